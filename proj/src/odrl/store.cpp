#include "uma/odrl/store.hpp"

#include <sodium.h>

#include <fstream>
#include <mutex>
#include <sstream>

namespace uma::odrl {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot read " + path.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

// Atomic with respect to concurrent readers: temp file then rename.
void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IOError("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw IOError("cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IOError("cannot rename into " + path.string());
}

}  // namespace

std::string sha256_hex(std::string_view data) {
    unsigned char digest[crypto_hash_sha256_BYTES];
    crypto_hash_sha256(digest,
                       reinterpret_cast<const unsigned char*>(data.data()),
                       data.size());
    char hex[crypto_hash_sha256_BYTES * 2 + 1];
    sodium_bin2hex(hex, sizeof(hex), digest, sizeof(digest));
    return hex;
}

std::map<std::string, Policy> PolicyStore::read_dir(const fs::path& dir) {
    std::map<std::string, Policy> out;
    if (!fs::exists(dir)) return out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || !name.ends_with(".odrl.json")) {
            continue;
        }
        Policy p = parse_policy(read_file(entry.path()));
        out.insert_or_assign(p.uid, std::move(p));
    }
    return out;
}

PolicyStore PolicyStore::open(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IOError("cannot create " + dir.string());
    PolicyStore store;
    store.policies_ = read_dir(dir);
    store.dir_ = dir;
    return store;
}

PolicyStore PolicyStore::load(const fs::path& dir) {
    PolicyStore store;
    store.policies_ = read_dir(dir);
    return store;
}

void PolicyStore::save(const fs::path& dir) const {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IOError("cannot create " + dir.string());
    std::shared_lock lock(mutex_);
    for (const auto& [uid, policy] : policies_) {
        write_file_atomic(dir / (sha256_hex(uid) + ".odrl.json"),
                          serialize_policy(policy));
    }
}

fs::path PolicyStore::file_for(const std::string& uid) const {
    return dir_ / (sha256_hex(uid) + ".odrl.json");
}

void PolicyStore::put(Policy policy) {
    validate(policy);
    std::unique_lock lock(mutex_);
    if (!dir_.empty()) {
        write_file_atomic(file_for(policy.uid), serialize_policy(policy));
    }
    policies_.insert_or_assign(policy.uid, std::move(policy));
}

Policy PolicyStore::get(const std::string& uid) const {
    std::shared_lock lock(mutex_);
    const auto it = policies_.find(uid);
    if (it == policies_.end()) throw NotFound("no policy with uid " + uid);
    return it->second;
}

void PolicyStore::remove(const std::string& uid) {
    std::unique_lock lock(mutex_);
    const auto it = policies_.find(uid);
    if (it == policies_.end()) throw NotFound("no policy with uid " + uid);
    if (!dir_.empty()) {
        std::error_code ec;
        fs::remove(file_for(uid), ec);
        if (ec) throw IOError("cannot remove " + file_for(uid).string());
    }
    policies_.erase(it);
}

std::vector<std::string> PolicyStore::list() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    out.reserve(policies_.size());
    for (const auto& [uid, policy] : policies_) out.push_back(uid);
    return out;
}

std::size_t PolicyStore::size() const {
    std::shared_lock lock(mutex_);
    return policies_.size();
}

std::vector<Policy> PolicyStore::snapshot() const {
    std::shared_lock lock(mutex_);
    std::vector<Policy> out;
    out.reserve(policies_.size());
    for (const auto& [uid, policy] : policies_) out.push_back(policy);
    return out;
}

}  // namespace uma::odrl
