#pragma once

// Little-endian byte encoding shared by the RF/IQ/checkpoint formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pwdcl/errors.hpp"

namespace pwdcl::binary {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class Writer {
public:
    void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    const std::string& str() const { return buf_; }
    std::size_t size() const { return buf_.size(); }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data, std::string_view what) : data_(data), what_(what) {}

    std::size_t offset() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool at_end() const { return pos_ == data_.size(); }

    /// Fails with the expected vs actual total length when fewer than n bytes remain.
    void need(std::size_t n) const {
        if (remaining() < n)
            throw FormatError(std::string(what_) + ": truncated payload, expected " + std::to_string(pos_ + n) +
                                  " bytes but file has " + std::to_string(data_.size()),
                              data_.size());
    }

    std::string_view bytes(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    void magic(std::string_view expected) {
        const std::size_t at = pos_;
        if (remaining() < expected.size() || data_.substr(pos_, expected.size()) != expected)
            throw FormatError(std::string(what_) + ": bad magic, expected '" + std::string(expected) + "'", at);
        pos_ += expected.size();
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    /// Reads a u32 and checks it against an expected version number.
    void version(std::uint32_t expected) {
        const std::size_t at = pos_;
        const auto v = u32();
        if (v != expected)
            throw FormatError(std::string(what_) + ": unsupported version " + std::to_string(v) + ", expected " +
                                  std::to_string(expected),
                              at);
    }

    [[noreturn]] void fail(const std::string& msg) const { throw FormatError(std::string(what_) + ": " + msg, pos_); }

private:
    std::string_view data_;
    std::string_view what_;
    std::size_t pos_ = 0;
};

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, std::string_view data) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

// Optional trailing metadata block: "META", u32 length, UTF-8 text.

inline void write_metadata(Writer& w, std::string_view text) {
    if (text.empty()) return;
    w.bytes("META");
    w.u32(static_cast<std::uint32_t>(text.size()));
    w.bytes(text);
}

inline std::string read_metadata(Reader& r) {
    if (r.at_end()) return {};
    r.magic("META");
    const auto n = r.u32();
    std::string text(r.bytes(n));
    if (!r.at_end()) r.fail("unexpected trailing bytes after metadata block");
    return text;
}

} // namespace pwdcl::binary
