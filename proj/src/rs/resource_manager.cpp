#include "uma/rs/resource_manager.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>

namespace uma::resource_server {

namespace fs = std::filesystem;

namespace {

constexpr const char* kMetaSuffix = ".__meta__";

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StorageError("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

std::optional<std::string> normalize_resource_path(std::string_view raw) {
    if (raw.empty() || raw[0] != '/') return std::nullopt;
    std::string path(raw);
    // Collapse nothing; just reject what the store cannot represent.
    std::size_t pos = 1;
    while (pos < path.size()) {
        const auto next = path.find('/', pos);
        const auto segment = path.substr(
            pos, next == std::string::npos ? std::string::npos : next - pos);
        if (segment.empty() || segment == "." || segment == ".." ||
            segment.ends_with(kMetaSuffix)) {
            return std::nullopt;
        }
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return path;
}

std::string parent_of(const std::string& path) {
    if (path == "/") return "/";
    std::string trimmed = path;
    if (trimmed.back() == '/') trimmed.pop_back();
    const auto slash = trimmed.rfind('/');
    return trimmed.substr(0, slash + 1);
}

ResourceManager::ResourceManager(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw StorageError("cannot create storage root " + root_.string());
}

fs::path ResourceManager::location(const std::string& path) const {
    // Leading '/' stripped; container paths lose the trailing '/' too.
    std::string rel = path.substr(1);
    if (!rel.empty() && rel.back() == '/') rel.pop_back();
    return rel.empty() ? root_ : root_ / rel;
}

fs::path ResourceManager::meta_location(const std::string& path) const {
    return location(path).string() + kMetaSuffix;
}

bool ResourceManager::exists(const std::string& path) const {
    std::shared_lock lock(mutex_);
    const auto loc = location(path);
    if (path.back() == '/') return fs::is_directory(loc);
    return fs::is_regular_file(loc);
}

StoredResource ResourceManager::read_locked(const std::string& path) const {
    const auto loc = location(path);
    StoredResource out;
    out.path = path;
    if (path.back() == '/') {
        if (!fs::is_directory(loc)) {
            throw ResourceNotFound("no container at " + path);
        }
        out.is_container = true;
        out.content_type = "application/json";
        for (const auto& entry : fs::directory_iterator(loc)) {
            const auto name = entry.path().filename().string();
            if (name.ends_with(kMetaSuffix)) continue;
            out.members.push_back(path + name +
                                  (entry.is_directory() ? "/" : ""));
        }
        std::sort(out.members.begin(), out.members.end());
        return out;
    }
    if (!fs::is_regular_file(loc)) {
        throw ResourceNotFound("no document at " + path);
    }
    out.body = read_file(loc);
    out.content_type = "application/octet-stream";
    if (fs::is_regular_file(meta_location(path))) {
        const auto meta = nlohmann::json::parse(
            read_file(meta_location(path)), nullptr, false);
        if (meta.is_object()) {
            out.content_type = meta.value("contentType", out.content_type);
        }
    }
    return out;
}

StoredResource ResourceManager::read(const std::string& path) const {
    std::shared_lock lock(mutex_);
    return read_locked(path);
}

bool ResourceManager::write(const std::string& path, std::string_view body,
                            const std::string& content_type) {
    std::unique_lock lock(mutex_);
    const auto loc = location(path);
    if (fs::is_directory(loc)) {
        throw ResourceConflict(path + " is a container");
    }
    if (!fs::is_directory(location(parent_of(path)))) {
        throw ResourceNotFound("parent container of " + path +
                               " does not exist");
    }
    const bool created = !fs::is_regular_file(loc);

    const fs::path tmp = loc.string() + ".__tmp__";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw StorageError("cannot write " + tmp.string());
        out << body;
        if (!out.flush()) throw StorageError("cannot write " + tmp.string());
    }
    if (pre_commit_hook) pre_commit_hook();
    std::error_code ec;
    fs::rename(tmp, loc, ec);
    if (ec) throw StorageError("cannot commit " + loc.string());

    const nlohmann::json meta = {{"contentType", content_type}};
    const fs::path meta_tmp = meta_location(path).string() + ".__tmp__";
    {
        std::ofstream out(meta_tmp, std::ios::binary | std::ios::trunc);
        out << meta.dump();
    }
    fs::rename(meta_tmp, meta_location(path), ec);
    if (ec) throw StorageError("cannot commit metadata for " + path);
    return created;
}

bool ResourceManager::create_container(const std::string& path) {
    std::unique_lock lock(mutex_);
    const auto loc = location(path);
    if (fs::is_regular_file(loc)) {
        throw ResourceConflict(path + " is a document");
    }
    if (fs::is_directory(loc)) return false;
    if (path != "/" && !fs::is_directory(location(parent_of(path)))) {
        throw ResourceNotFound("parent container of " + path +
                               " does not exist");
    }
    std::error_code ec;
    fs::create_directory(loc, ec);
    if (ec) throw StorageError("cannot create container " + path);
    return true;
}

void ResourceManager::remove(const std::string& path) {
    std::unique_lock lock(mutex_);
    const auto loc = location(path);
    if (path.back() == '/') {
        if (!fs::is_directory(loc)) {
            throw ResourceNotFound("no container at " + path);
        }
        for (const auto& entry : fs::directory_iterator(loc)) {
            if (!entry.path().filename().string().ends_with(kMetaSuffix)) {
                throw ResourceConflict("container " + path + " is not empty");
            }
        }
        std::error_code ec;
        fs::remove_all(loc, ec);
        if (ec) throw StorageError("cannot remove container " + path);
    } else {
        if (!fs::is_regular_file(loc)) {
            throw ResourceNotFound("no document at " + path);
        }
        std::error_code ec;
        fs::remove(loc, ec);
        if (ec) throw StorageError("cannot remove " + path);
        fs::remove(meta_location(path), ec);
    }
}

std::vector<std::string> ResourceManager::list(
    const std::string& container) const {
    return read(container).members;
}

}  // namespace uma::resource_server
