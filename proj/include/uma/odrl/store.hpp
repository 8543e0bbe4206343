#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <stdexcept>
#include <vector>

#include "uma/odrl/model.hpp"

namespace uma::odrl {

struct NotFound : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IOError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Keeps policies by uid, optionally persisted as a directory of
/// `<sha256(uid)>.odrl.json` files. Mutations are serialized behind a
/// single writer; readers always observe a consistent store state.
class PolicyStore {
public:
    /// In-memory store.
    PolicyStore() = default;

    PolicyStore(PolicyStore&& other) noexcept
        : policies_(std::move(other.policies_)),
          dir_(std::move(other.dir_)) {}
    PolicyStore& operator=(PolicyStore&& other) noexcept {
        policies_ = std::move(other.policies_);
        dir_ = std::move(other.dir_);
        return *this;
    }

    /// File-backed store rooted at `dir` (created if missing); put and
    /// remove write through atomically (temp file + rename).
    static PolicyStore open(const std::filesystem::path& dir);

    /// Loads a directory of policy files into a memory-backed store.
    static PolicyStore load(const std::filesystem::path& dir);

    /// Writes every policy to `dir` in the file layout above.
    void save(const std::filesystem::path& dir) const;

    void put(Policy policy);
    Policy get(const std::string& uid) const;       // throws NotFound
    void remove(const std::string& uid);            // throws NotFound
    std::vector<std::string> list() const;          // sorted uids
    std::size_t size() const;

    /// Immutable copy of all policies, sorted by uid; the evaluation
    /// snapshot taken once per token request.
    std::vector<Policy> snapshot() const;

private:
    static std::map<std::string, Policy> read_dir(
        const std::filesystem::path& dir);
    std::filesystem::path file_for(const std::string& uid) const;

    mutable std::shared_mutex mutex_;
    std::map<std::string, Policy> policies_;
    std::filesystem::path dir_;  // empty for memory backing
};

/// Hex-encoded SHA-256, used for the on-disk policy file names.
std::string sha256_hex(std::string_view data);

}  // namespace uma::odrl
