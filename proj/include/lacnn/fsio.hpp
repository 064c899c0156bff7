#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "lacnn/errors.hpp"

namespace lacnn {

/// Writes bytes to `path` via a temporary file in the same directory plus an
/// atomic rename, so readers never observe a partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw DataError("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw DataError("rename failed for " + path.string() + ": " + ec.message());
    }
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bytes;
}

/// Little-endian binary buffer builder.
class BinaryWriter {
public:
    void put_bytes(const void* p, size_t n) {
        buf_.append(static_cast<const char*>(p), n);
    }
    void put_u8(uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void put_u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void put_u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void put_f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        put_u32(bits);
    }
    void put_f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        put_u64(bits);
    }
    void put_string(const std::string& s) {
        put_u32(static_cast<uint32_t>(s.size()));
        buf_.append(s);
    }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

/// Little-endian binary buffer reader; throws DataError on truncation.
class BinaryReader {
public:
    explicit BinaryReader(const std::string& bytes) : bytes_(bytes) {}

    void get_bytes(void* p, size_t n) {
        require(n);
        std::memcpy(p, bytes_.data() + pos_, n);
        pos_ += n;
    }
    uint8_t get_u8() {
        require(1);
        return static_cast<uint8_t>(bytes_[pos_++]);
    }
    uint32_t get_u32() {
        require(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<uint32_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    uint64_t get_u64() {
        require(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<uint64_t>(static_cast<uint8_t>(bytes_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    float get_f32() {
        uint32_t bits = get_u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double get_f64() {
        uint64_t bits = get_u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string get_string() {
        uint32_t n = get_u32();
        require(n);
        std::string s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    bool at_end() const { return pos_ == bytes_.size(); }

private:
    void require(size_t n) const {
        if (pos_ + n > bytes_.size()) throw DataError("truncated binary data");
    }
    const std::string& bytes_;
    size_t pos_ = 0;
};

/// Exclusive ownership of an output directory for the lifetime of the object.
/// Creation fails if another process holds the lock.
class DirLock {
public:
    explicit DirLock(const std::filesystem::path& dir) : lock_path_(dir / ".lacnn.lock") {
        std::filesystem::create_directories(dir);
        if (std::filesystem::exists(lock_path_))
            throw DataError("output directory is locked by another run: " + dir.string());
        std::ofstream out(lock_path_);
        if (!out) throw DataError("cannot create lockfile: " + lock_path_.string());
        out << ::getpid() << "\n";
        owned_ = true;
    }
    ~DirLock() {
        if (owned_) {
            std::error_code ec;
            std::filesystem::remove(lock_path_, ec);
        }
    }
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;

private:
    std::filesystem::path lock_path_;
    bool owned_ = false;
};

} // namespace lacnn
