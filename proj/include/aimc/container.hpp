#pragma once

// Canonical class-file container.
//
// Layout (all little-endian):
//   "AIMCSPEC" | u16 version | u16 flags | u32 pulse_count | u32 capture_len
//   | f64 sample_rate_hz | f32 snr_db | 32-byte class id (zero-padded UTF-8)
// then pulse_count records:
//   u64 seed | f64 carrier_hz | f64 pw_s | f64 toa_s | f32 measured_snr_db
//   | u16 n_extra | n_extra x (16-byte key, f64 value)
//   | 2 x capture_len f32 (interleaved I, Q) | u32 CRC32 of the record bytes before it

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "aimc/binary.hpp"
#include "aimc/errors.hpp"
#include "aimc/hash.hpp"
#include "aimc/synth.hpp"

namespace aimc::container {

inline constexpr char magic[8] = {'A', 'I', 'M', 'C', 'S', 'P', 'E', 'C'};
inline constexpr std::uint16_t current_version = 1;
inline constexpr std::size_t header_size = 64;
inline constexpr std::size_t class_id_width = 32;
inline constexpr std::size_t key_width = 16;

struct ClassFileHeader {
    std::uint16_t version = current_version;
    std::uint16_t flags = 0;
    std::uint32_t pulse_count = 0;
    std::uint32_t capture_len = 0;
    double sample_rate_hz = 0;
    float snr_db = 0;
    std::string class_id;

    friend bool operator==(const ClassFileHeader&, const ClassFileHeader&) = default;
};

/// One stored pulse: descriptor, realized SNR and the noisy capture.
struct ClassRecord {
    PulseParams params;
    float measured_snr_db = 0;
    IqBuffer iq;

    friend bool operator==(const ClassRecord&, const ClassRecord&) = default;
};

inline std::size_t record_size(std::size_t n_extra, std::size_t capture_len) {
    return 8 + 8 * 3 + 4 + 2 + n_extra * (key_width + 8) + capture_len * 8 + 4;
}

inline std::vector<std::uint8_t> encode_header(const ClassFileHeader& h) {
    std::vector<std::uint8_t> out(std::begin(magic), std::end(magic));
    binary::put(out, h.version);
    binary::put(out, h.flags);
    binary::put(out, h.pulse_count);
    binary::put(out, h.capture_len);
    binary::put(out, h.sample_rate_hz);
    binary::put(out, h.snr_db);
    binary::put_fixed(out, h.class_id, class_id_width);
    return out;
}

inline std::vector<std::uint8_t> encode_record(const ClassRecord& r, std::uint32_t capture_len) {
    if (r.iq.size() != capture_len)
        throw ContainerError(ContainerError::Kind::invalid, "record length differs from the file capture length");
    if (r.params.class_params.size() > 0xFFFF)
        throw ContainerError(ContainerError::Kind::invalid, "too many class parameters");
    std::vector<std::uint8_t> out;
    out.reserve(record_size(r.params.class_params.size(), capture_len));
    binary::put(out, r.params.seed);
    binary::put(out, r.params.carrier_hz);
    binary::put(out, r.params.pulse_width_s);
    binary::put(out, r.params.toa_s);
    binary::put(out, r.measured_snr_db);
    binary::put(out, static_cast<std::uint16_t>(r.params.class_params.size()));
    for (const auto& [key, value] : r.params.class_params) {
        if (key.size() > key_width || key.empty())
            throw ContainerError(ContainerError::Kind::invalid, "parameter key must be 1..16 bytes: " + key);
        binary::put_fixed(out, key, key_width);
        binary::put(out, value);
    }
    for (const auto& s : r.iq) {
        binary::put(out, s.real());
        binary::put(out, s.imag());
    }
    binary::put(out, crc32(out));
    return out;
}

/// Streams records into a class file. The header is written up front with the
/// declared pulse count; `finish` fails unless exactly that many were appended.
/// Data goes to `<path>.part` and is renamed into place on success.
class ClassFileWriter {
public:
    ClassFileWriter(std::filesystem::path path, ClassFileHeader header)
        : path_(std::move(path)), temp_(path_.string() + ".part"), header_(std::move(header)) {
        if (header_.class_id.empty() || header_.class_id.size() > class_id_width)
            throw ContainerError(ContainerError::Kind::invalid, "class id must be 1..32 bytes");
        if (header_.pulse_count == 0) throw ContainerError(ContainerError::Kind::invalid, "empty record list");
        out_.open(temp_, std::ios::binary | std::ios::trunc);
        if (!out_) throw ContainerError(ContainerError::Kind::io, "cannot create " + temp_.string());
        emit(encode_header(header_));
    }

    void append(const ClassRecord& record) {
        if (written_ >= header_.pulse_count)
            throw ContainerError(ContainerError::Kind::invalid, "more records than declared");
        if (record.params.class_id != header_.class_id)
            throw ContainerError(ContainerError::Kind::invalid,
                                 "heterogeneous records: " + record.params.class_id + " in " + header_.class_id + " file");
        emit(encode_record(record, header_.capture_len));
        ++written_;
    }

    /// Closes the file and returns its SHA-256.
    std::string finish() {
        if (written_ != header_.pulse_count)
            throw ContainerError(ContainerError::Kind::invalid, "record count differs from the declared pulse count");
        out_.close();
        if (!out_) throw ContainerError(ContainerError::Kind::io, "write failed for " + temp_.string());
        std::filesystem::rename(temp_, path_);
        return sha_.hex();
    }

    std::uint64_t bytes_written() const noexcept { return bytes_; }

private:
    void emit(const std::vector<std::uint8_t>& bytes) {
        out_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out_) throw ContainerError(ContainerError::Kind::io, "write failed for " + temp_.string());
        sha_.update(bytes);
        bytes_ += bytes.size();
    }

    std::filesystem::path path_;
    std::filesystem::path temp_;
    ClassFileHeader header_;
    std::ofstream out_;
    Sha256 sha_;
    std::uint32_t written_ = 0;
    std::uint64_t bytes_ = 0;
};

inline ClassFileHeader decode_header(const std::uint8_t* p) {
    if (!std::equal(std::begin(magic), std::end(magic), p))
        throw ContainerError(ContainerError::Kind::format, "bad magic: not an AIMCSPEC class file");
    ClassFileHeader h;
    h.version = binary::get<std::uint16_t>(p + 8);
    if (h.version > current_version)
        throw ContainerError(ContainerError::Kind::version,
                             "format version " + std::to_string(h.version) + " is newer than supported " +
                                 std::to_string(current_version));
    if (h.version == 0) throw ContainerError(ContainerError::Kind::format, "format version 0 is invalid");
    h.flags = binary::get<std::uint16_t>(p + 10);
    h.pulse_count = binary::get<std::uint32_t>(p + 12);
    h.capture_len = binary::get<std::uint32_t>(p + 16);
    h.sample_rate_hz = binary::get<double>(p + 20);
    h.snr_db = binary::get<float>(p + 28);
    h.class_id = binary::get_fixed(p + 32, class_id_width);
    return h;
}

/// Sequential reader validating each record's CRC.
class ClassFileReader {
public:
    explicit ClassFileReader(const std::filesystem::path& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw ContainerError(ContainerError::Kind::io, "cannot open " + path.string());
        std::vector<std::uint8_t> bytes(header_size);
        if (!read_exact(bytes.data(), bytes.size())) {
            const auto got = std::min<std::size_t>(static_cast<std::size_t>(in_.gcount()), sizeof magic);
            if (!std::equal(std::begin(magic), std::begin(magic) + got, bytes.begin()))
                throw ContainerError(ContainerError::Kind::format, "bad magic: not an AIMCSPEC class file");
            throw ContainerError(ContainerError::Kind::truncated, "file ends inside the header: " + path.string());
        }
        header_ = decode_header(bytes.data());
    }

    const ClassFileHeader& header() const noexcept { return header_; }
    std::uint32_t next_index() const noexcept { return index_; }
    bool done() const noexcept { return index_ >= header_.pulse_count; }

    /// Reads the next record; throws ContainerError naming the pulse index on failure.
    ClassRecord next() {
        if (done()) throw ContainerError(ContainerError::Kind::invalid, "read past the last record");
        const std::uint32_t idx = index_++;
        auto truncated = [&] {
            return ContainerError(ContainerError::Kind::truncated,
                                  "file truncated inside pulse " + std::to_string(idx) + " of " + path_.string(), idx);
        };
        std::vector<std::uint8_t> buf(8 + 24 + 4 + 2);
        if (!read_exact(buf.data(), buf.size())) throw truncated();
        const auto n_extra = binary::get<std::uint16_t>(buf.data() + 36);
        const std::size_t total = record_size(n_extra, header_.capture_len);
        buf.resize(total);
        if (!read_exact(buf.data() + 38, total - 38)) throw truncated();
        const auto stored = binary::get<std::uint32_t>(buf.data() + total - 4);
        if (crc32({buf.data(), total - 4}) != stored)
            throw ContainerError(ContainerError::Kind::checksum,
                                 "CRC mismatch in pulse " + std::to_string(idx) + " of " + path_.string(), idx);

        ClassRecord r;
        const std::uint8_t* p = buf.data();
        r.params.class_id = header_.class_id;
        r.params.seed = binary::get<std::uint64_t>(p);
        r.params.carrier_hz = binary::get<double>(p + 8);
        r.params.pulse_width_s = binary::get<double>(p + 16);
        r.params.toa_s = binary::get<double>(p + 24);
        r.measured_snr_db = binary::get<float>(p + 32);
        p += 38;
        for (std::uint16_t i = 0; i < n_extra; ++i, p += key_width + 8)
            r.params.class_params[binary::get_fixed(p, key_width)] = binary::get<double>(p + key_width);
        r.iq.resize(header_.capture_len);
        for (auto& s : r.iq) {
            s = cfloat(binary::get<float>(p), binary::get<float>(p + 4));
            p += 8;
        }
        if (done()) {
            // Nothing may follow the last record.
            if (in_.peek() != std::char_traits<char>::eof())
                throw ContainerError(ContainerError::Kind::format, "trailing bytes after the last record in " + path_.string());
        }
        return r;
    }

private:
    bool read_exact(std::uint8_t* dst, std::size_t n) {
        in_.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        return static_cast<std::size_t>(in_.gcount()) == n;
    }

    std::filesystem::path path_;
    std::ifstream in_;
    ClassFileHeader header_;
    std::uint32_t index_ = 0;
};

/// Writes all records (same class) and returns the file's SHA-256.
inline std::string write_class_file(const std::filesystem::path& path, const std::vector<ClassRecord>& records,
                                    double sample_rate_hz, float snr_db) {
    if (records.empty()) throw ContainerError(ContainerError::Kind::invalid, "empty record list");
    ClassFileHeader h;
    h.pulse_count = static_cast<std::uint32_t>(records.size());
    h.capture_len = static_cast<std::uint32_t>(records.front().iq.size());
    h.sample_rate_hz = sample_rate_hz;
    h.snr_db = snr_db;
    h.class_id = records.front().params.class_id;
    ClassFileWriter writer(path, h);
    for (const auto& r : records) writer.append(r);
    return writer.finish();
}

inline std::vector<ClassRecord> read_class_file(const std::filesystem::path& path, ClassFileHeader* header = nullptr) {
    ClassFileReader reader(path);
    if (header) *header = reader.header();
    std::vector<ClassRecord> records;
    records.reserve(reader.header().pulse_count);
    while (!reader.done()) records.push_back(reader.next());
    return records;
}

/// Streams every record through `fn(index, record)`.
inline ClassFileHeader for_each_record(const std::filesystem::path& path,
                                       const std::function<void(std::uint32_t, const ClassRecord&)>& fn) {
    ClassFileReader reader(path);
    while (!reader.done()) {
        const auto idx = reader.next_index();
        fn(idx, reader.next());
    }
    return reader.header();
}

}  // namespace aimc::container
