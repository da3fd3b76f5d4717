#include "chainnet/ingest.hpp"

#include <zlib.h>

#include <array>
#include <cctype>
#include <cstring>

#include "chainnet/error.hpp"
#include "chainnet/timeutil.hpp"

namespace chainnet {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

int split_fields(std::string_view line, char delim, std::array<std::string_view, 8>& out) {
    int n = 0;
    size_t start = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            if (n < 8) out[n] = trim(line.substr(start, i - start));
            ++n;
            start = i + 1;
        }
    }
    return n;
}

[[noreturn]] void row_error(std::uint64_t line_no, const std::string& what) {
    throw DataError("row " + std::to_string(line_no) + ": " + what);
}

std::uint64_t parse_u64(std::string_view s, std::uint64_t line_no, const char* field) {
    if (s.empty()) row_error(line_no, std::string("empty ") + field);
    std::uint64_t v = 0;
    for (char c : s) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            row_error(line_no, std::string("bad ") + field + " \"" + std::string(s) + "\"");
        std::uint64_t d = std::uint64_t(c - '0');
        if (v > (~std::uint64_t(0) - d) / 10)
            row_error(line_no, std::string(field) + " out of range");
        v = v * 10 + d;
    }
    return v;
}

}  // namespace

TransactionRecord parse_record(std::string_view line, char delim, std::uint64_t line_no) {
    std::array<std::string_view, 8> f;
    int n = split_fields(line, delim, f);
    if (n != 7)
        row_error(line_no, "expected 7 fields, got " + std::to_string(n));

    TransactionRecord rec;
    rec.block_number = parse_u64(f[0], line_no, "block_number");
    rec.transaction_id = std::string(f[1]);
    if (rec.transaction_id.empty()) row_error(line_no, "empty transaction_id");

    if (f[2] == "0" || f[2] == "false")
        rec.is_coinbase = false;
    else if (f[2] == "1" || f[2] == "true")
        rec.is_coinbase = true;
    else
        row_error(line_no, "bad is_coinbase \"" + std::string(f[2]) + "\"");

    rec.input_address = std::string(f[3]);
    rec.output_address = std::string(f[4]);
    if (rec.output_address.empty()) row_error(line_no, "empty output_address");
    if (rec.is_coinbase && !rec.input_address.empty())
        row_error(line_no, "coinbase row carries an input address");
    if (!rec.is_coinbase && rec.input_address.empty())
        row_error(line_no, "missing input address on non-coinbase row");

    try {
        rec.value = parse_sat_value(f[5]);
    } catch (const DataError& e) {
        row_error(line_no, e.what());
    }
    try {
        rec.timestamp = parse_utc_timestamp(f[6]);
    } catch (const DataError& e) {
        row_error(line_no, e.what());
    }
    return rec;
}

std::string csv_header(char delim) {
    std::string out;
    for (int i = 0; i < 7; ++i) {
        if (i) out.push_back(delim);
        out += kCsvColumns[i];
    }
    return out;
}

std::string record_to_csv(const TransactionRecord& rec, char delim) {
    std::string out = std::to_string(rec.block_number);
    out.push_back(delim);
    out += rec.transaction_id;
    out.push_back(delim);
    out.push_back(rec.is_coinbase ? '1' : '0');
    out.push_back(delim);
    out += rec.input_address;
    out.push_back(delim);
    out += rec.output_address;
    out.push_back(delim);
    out += std::to_string(rec.value);
    out.push_back(delim);
    out += format_utc_timestamp(rec.timestamp);
    return out;
}

// --- AddressDictionary ---

AddressDictionary::AddressDictionary(const std::string& persist_path) {
    // Load whatever is already there; tolerate a missing file.
    if (std::FILE* in = std::fopen(persist_path.c_str(), "rb")) {
        std::string line;
        int c;
        while ((c = std::fgetc(in)) != EOF) {
            if (c != '\n') {
                line.push_back(char(c));
                continue;
            }
            if (!line.empty()) {
                size_t tab = line.find('\t');
                if (tab == std::string::npos)
                    throw DataError("dictionary file " + persist_path + ": missing tab");
                std::uint64_t id = parse_u64(line.substr(0, tab), keys_.size() + 1, "id");
                if (id != keys_.size())
                    throw DataError("dictionary file " + persist_path + ": ids not dense");
                std::string key = line.substr(tab + 1);
                ids_.emplace(key, id);
                keys_.push_back(std::move(key));
            }
            line.clear();
        }
        std::fclose(in);
        if (!line.empty()) throw DataError("dictionary file " + persist_path + ": truncated line");
    }
    persist_ = std::fopen(persist_path.c_str(), "ab");
    if (!persist_) throw IoError("cannot open dictionary file " + persist_path);
}

AddressDictionary::~AddressDictionary() {
    if (persist_) std::fclose(persist_);
}

std::uint64_t AddressDictionary::intern(std::string_view key) {
    if (key.empty()) throw DataError("empty address key");
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = ids_.emplace(std::string(key), keys_.size());
    if (inserted) {
        keys_.emplace_back(key);
        if (persist_)
            std::fprintf(persist_, "%llu\t%.*s\n", (unsigned long long)it->second,
                         int(key.size()), key.data());
    }
    return it->second;
}

std::optional<std::uint64_t> AddressDictionary::lookup(std::string_view key) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = ids_.find(std::string(key));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::string AddressDictionary::key_of(std::uint64_t id) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (id >= keys_.size()) throw DataError("unknown address id " + std::to_string(id));
    return keys_[id];
}

std::uint64_t AddressDictionary::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return keys_.size();
}

void AddressDictionary::flush() {
    std::lock_guard<std::mutex> lock(mu_);
    if (persist_) std::fflush(persist_);
}

// --- LineReader ---

struct LineReader::Impl {
    gzFile gz = nullptr;
    std::vector<char> buf = std::vector<char>(1 << 20);
    size_t pos = 0, len = 0;
    bool eof = false;
};

LineReader::LineReader(const std::string& path) : impl_(new Impl) {
    impl_->gz = gzopen(path.c_str(), "rb");
    if (!impl_->gz) throw IoError("cannot open " + path);
    gzbuffer(impl_->gz, 1 << 20);
}

LineReader::~LineReader() {
    if (impl_ && impl_->gz) gzclose(impl_->gz);
}

bool LineReader::next(std::string& line) {
    line.clear();
    Impl& im = *impl_;
    for (;;) {
        if (im.pos == im.len) {
            if (im.eof) break;
            int n = gzread(im.gz, im.buf.data(), unsigned(im.buf.size()));
            if (n < 0) {
                int errnum = 0;
                const char* msg = gzerror(im.gz, &errnum);
                throw IoError(std::string("read error: ") + (msg ? msg : "gzread failed"));
            }
            im.pos = 0;
            im.len = size_t(n);
            if (n == 0) {
                im.eof = true;
                break;
            }
        }
        char* start = im.buf.data() + im.pos;
        char* nl = static_cast<char*>(std::memchr(start, '\n', im.len - im.pos));
        if (nl) {
            line.append(start, nl - start);
            im.pos += size_t(nl - start) + 1;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return true;
        }
        line.append(start, im.len - im.pos);
        im.pos = im.len;
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return !line.empty();
}

// --- RecordReader ---

RecordReader::RecordReader(const std::string& path) : lines_(path), path_(path) {
    if (!lines_.next(buf_)) throw DataError(path + ": empty input, missing header");
    ++line_no_;
    delim_ = buf_.find('\t') != std::string::npos ? '\t' : ',';
    std::array<std::string_view, 8> f;
    int n = split_fields(buf_, delim_, f);
    bool ok = n == 7;
    for (int i = 0; ok && i < 7; ++i) ok = f[i] == kCsvColumns[i];
    if (!ok)
        throw DataError(path + ": header does not match the expected column layout");
}

bool RecordReader::next(TransactionRecord& rec) {
    while (lines_.next(buf_)) {
        ++line_no_;
        if (trim(buf_).empty()) continue;
        try {
            rec = parse_record(buf_, delim_, line_no_);
        } catch (const DataError& e) {
            throw DataError(path_ + ": " + e.what());
        }
        return true;
    }
    return false;
}

}  // namespace chainnet
