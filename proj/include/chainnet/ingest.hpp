#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chainnet/money.hpp"

namespace chainnet {

// One raw row of a chain extract: a single input->output pair observation of
// one transaction. Coinbase rows have no input address.
struct TransactionRecord {
    std::uint64_t block_number = 0;
    std::string transaction_id;
    bool is_coinbase = false;
    std::string input_address;  // empty iff is_coinbase
    std::string output_address;
    Sats value = 0;
    std::int64_t timestamp = 0;  // UTC epoch seconds

    bool operator==(const TransactionRecord&) const = default;
};

inline constexpr const char* kCsvColumns[7] = {
    "block_number", "transaction_id",    "is_coinbase", "input_address_id",
    "output_address_id", "value", "timestamp"};

// line_no is used in diagnostics only. Throws DataError naming the row on any
// malformed field.
TransactionRecord parse_record(std::string_view line, char delim, std::uint64_t line_no);

std::string record_to_csv(const TransactionRecord& rec, char delim = ',');
std::string csv_header(char delim = ',');

// Address key -> dense integer ID, assigned in first-seen order. Optionally
// backed by an append-only "id<TAB>key" file so multi-year runs share one ID
// space. intern() is safe to call concurrently (first writer wins); for a
// byte-deterministic ID assignment callers intern in stream order.
class AddressDictionary {
public:
    AddressDictionary() = default;
    explicit AddressDictionary(const std::string& persist_path);  // loads + appends
    ~AddressDictionary();

    AddressDictionary(const AddressDictionary&) = delete;
    AddressDictionary& operator=(const AddressDictionary&) = delete;

    std::uint64_t intern(std::string_view key);  // throws DataError on empty key
    std::optional<std::uint64_t> lookup(std::string_view key) const;
    std::string key_of(std::uint64_t id) const;  // throws DataError on unknown id
    std::uint64_t size() const;
    void flush();

private:
    mutable std::mutex mu_;
    std::unordered_map<std::string, std::uint64_t> ids_;
    std::vector<std::string> keys_;
    std::FILE* persist_ = nullptr;
};

// Line-oriented reader over a plain or gzip-compressed file (zlib reads both
// transparently).
class LineReader {
public:
    explicit LineReader(const std::string& path);  // throws IoError
    ~LineReader();

    LineReader(const LineReader&) = delete;
    LineReader& operator=(const LineReader&) = delete;

    bool next(std::string& line);  // strips the trailing newline / CR

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Reads a whole extract: validates the header (Table-layout column names,
// comma or tab auto-detected), then yields records. Blank lines are skipped.
class RecordReader {
public:
    explicit RecordReader(const std::string& path);  // throws IoError/DataError

    bool next(TransactionRecord& rec);  // throws DataError naming the row
    std::uint64_t line_number() const { return line_no_; }
    char delimiter() const { return delim_; }

private:
    LineReader lines_;
    std::string path_;
    char delim_ = ',';
    std::uint64_t line_no_ = 0;
    std::string buf_;
};

}  // namespace chainnet
