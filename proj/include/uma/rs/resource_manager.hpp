#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace uma::resource_server {

struct StoredResource {
    std::string path;  // container paths end with '/'
    bool is_container = false;
    std::string content_type;
    std::string body;                  // documents only
    std::vector<std::string> members;  // containers only, sorted
};

struct ResourceNotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ResourceConflict : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct StorageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Validates and normalizes a resource path: absolute, no empty or
/// dot segments. Returns nullopt when invalid.
std::optional<std::string> normalize_resource_path(std::string_view raw);

/// Parent container of a non-root path ("/docs/a" -> "/docs/").
std::string parent_of(const std::string& path);

/// Hierarchical document store backed by the filesystem: documents as
/// files, containers as directories, a sidecar file per document for
/// its content type. Writes go through a temp file and rename, so a
/// crash mid-write leaves the previous content intact.
class ResourceManager {
public:
    explicit ResourceManager(std::filesystem::path root);

    bool exists(const std::string& path) const;
    StoredResource read(const std::string& path) const;

    /// Creates or replaces a document. The parent container must
    /// exist. Returns true when the document was newly created.
    bool write(const std::string& path, std::string_view body,
               const std::string& content_type);

    /// Creates a container (and nothing else). Returns true when new.
    bool create_container(const std::string& path);

    /// Removes a document or an empty container.
    void remove(const std::string& path);

    std::vector<std::string> list(const std::string& container) const;

    /// Fault-injection hook, run between the temp-file write and the
    /// rename that commits it. Test use only.
    std::function<void()> pre_commit_hook;

private:
    std::filesystem::path location(const std::string& path) const;
    std::filesystem::path meta_location(const std::string& path) const;
    StoredResource read_locked(const std::string& path) const;

    std::filesystem::path root_;
    mutable std::shared_mutex mutex_;
};

}  // namespace uma::resource_server
