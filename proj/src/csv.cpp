#include "moreas/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace moreas {

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    row_open_ = true;
    for (const auto& h : header) raw(h);
    row_end();
}

void CsvWriter::row_start() {
    if (row_open_) throw std::logic_error("CsvWriter: previous row not closed");
    row_open_ = true;
    in_row_ = 0;
}

void CsvWriter::raw(const std::string& s) {
    if (!row_open_) throw std::logic_error("CsvWriter: field outside row");
    if (in_row_ > 0) out_ += ',';
    const bool quote = s.find_first_of(",\"\r\n") != std::string::npos;
    if (quote) {
        out_ += '"';
        for (char c : s) {
            if (c == '"') out_ += '"';
            out_ += c;
        }
        out_ += '"';
    } else {
        out_ += s;
    }
    ++in_row_;
}

void CsvWriter::field(const std::string& s) { raw(s); }

void CsvWriter::field(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    raw(buf);
}

void CsvWriter::field(int v) { raw(std::to_string(v)); }
void CsvWriter::field(long v) { raw(std::to_string(v)); }
void CsvWriter::field(bool v) { raw(v ? "1" : "0"); }
void CsvWriter::field_empty() { raw(""); }

void CsvWriter::row_end() {
    if (!row_open_) throw std::logic_error("CsvWriter: row_end outside row");
    if (in_row_ != columns_ && !(in_row_ == 0 && columns_ == 0))
        throw std::logic_error("CsvWriter: wrong field count in row");
    out_ += '\n';
    row_open_ = false;
    in_row_ = 0;
}

void CsvWriter::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << out_;
    if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::vector<std::string>> parse_rfc4180(const std::string& text,
                                                    const std::string& origin) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto end_field = [&] {
        row.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(row);
        row.clear();
    };
    while (i < n) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < n && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                } else {
                    quoted = false;
                    ++i;
                }
            } else {
                field += c;
                ++i;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field_started && !field.empty())
                    throw std::invalid_argument(origin + ": stray quote in unquoted field");
                quoted = true;
                field_started = true;
                ++i;
                break;
            case ',':
                end_field();
                ++i;
                break;
            case '\r':
                ++i;
                break;
            case '\n':
                end_row();
                ++i;
                break;
            default:
                field += c;
                field_started = true;
                ++i;
        }
    }
    if (quoted) throw std::invalid_argument(origin + ": unterminated quoted field");
    if (field_started || !row.empty()) end_row();
    return rows;
}

}  // namespace

CsvTable CsvTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open CSV file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

CsvTable CsvTable::parse(const std::string& text, const std::string& origin) {
    CsvTable t;
    t.origin_ = origin;
    auto rows = parse_rfc4180(text, origin);
    if (rows.empty()) throw std::invalid_argument(origin + ": missing header row");
    const auto& header = rows.front();
    for (std::size_t c = 0; c < header.size(); ++c) t.index_[header[c]] = c;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size())
            throw std::invalid_argument(origin + ": row " + std::to_string(r) +
                                        " has wrong field count");
        t.cells_.push_back(std::move(rows[r]));
    }
    return t;
}

const std::string& CsvTable::cell(std::size_t row, const std::string& col) const {
    auto it = index_.find(col);
    if (it == index_.end()) throw std::invalid_argument(origin_ + ": missing column " + col);
    return cells_.at(row).at(it->second);
}

bool CsvTable::empty_cell(std::size_t row, const std::string& col) const {
    return cell(row, col).empty();
}

double CsvTable::number(std::size_t row, const std::string& col) const {
    const std::string& s = cell(row, col);
    if (s.empty())
        throw std::invalid_argument(origin_ + ": empty value in column " + col + " row " +
                                    std::to_string(row));
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size())
        throw std::invalid_argument(origin_ + ": bad number '" + s + "' in column " + col);
    return v;
}

std::optional<double> CsvTable::opt_number(std::size_t row, const std::string& col) const {
    if (empty_cell(row, col)) return std::nullopt;
    return number(row, col);
}

void CsvTable::require_columns(const std::vector<std::string>& names) const {
    for (const auto& n : names)
        if (!index_.count(n))
            throw std::invalid_argument(origin_ + ": schema mismatch, missing column " + n);
}

}  // namespace moreas
