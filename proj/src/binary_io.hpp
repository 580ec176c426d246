#pragma once

// Little-endian byte buffers shared by the on-disk formats.

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fastsketch/error.hpp"

namespace fastsketch::detail {

class ByteWriter {
public:
    void put_u8(std::uint8_t v) { buf_.push_back(v); }

    void put_u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    void put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

    void put_magic(std::string_view magic) { buf_.insert(buf_.end(), magic.begin(), magic.end()); }

    void put_string(std::string_view s) {
        put_u32(static_cast<std::uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    std::vector<std::uint8_t> take() && { return std::move(buf_); }

private:
    std::vector<std::uint8_t> buf_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::uint64_t offset() const noexcept { return pos_; }
    bool at_end() const noexcept { return pos_ == data_.size(); }

    std::uint8_t get_u8() {
        need(1, "u8");
        return data_[pos_++];
    }

    std::uint32_t get_u32() {
        need(4, "u32");
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | data_[pos_ + i];
        pos_ += 4;
        return v;
    }

    std::uint64_t get_u64() {
        need(8, "u64");
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | data_[pos_ + i];
        pos_ += 8;
        return v;
    }

    double get_f64() { return std::bit_cast<double>(get_u64()); }

    void expect_magic(std::string_view magic) {
        const std::uint64_t at = pos_;
        need(magic.size(), "magic");
        if (std::memcmp(data_.data() + pos_, magic.data(), magic.size()) != 0) {
            throw FormatError("bad magic, expected \"" + std::string(magic) + "\"", at);
        }
        pos_ += magic.size();
    }

    std::string get_string() {
        const std::uint32_t n = get_u32();
        need(n, "string body");
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    // Guards a count read from the file before it is used to size a container.
    void check_count(std::uint64_t count, std::uint64_t record_bytes, const char* what) const {
        if (record_bytes != 0 && count > (data_.size() - pos_) / record_bytes) {
            throw FormatError(std::string("truncated ") + what, pos_);
        }
    }

    void expect_end() const {
        if (!at_end()) throw FormatError("trailing bytes", pos_);
    }

private:
    void need(std::size_t n, const char* what) const {
        if (data_.size() - pos_ < n) {
            throw FormatError(std::string("unexpected end of data reading ") + what, pos_);
        }
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace fastsketch::detail
