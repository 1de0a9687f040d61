#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace moreas {

/// RFC 4180 writer. Reals are serialized with 9 significant digits;
/// missing optionals become empty fields.
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header);

    void row_start();
    void field(const std::string& s);
    void field(const char* s) { field(std::string(s)); }
    void field(double v);
    void field(int v);
    void field(long v);
    void field(bool v);
    void field_empty();
    template <typename T>
    void field(const std::optional<T>& v) {
        if (v) field(*v);
        else field_empty();
    }
    void row_end();

    const std::string& str() const { return out_; }

    /// Writes the accumulated bytes; throws std::runtime_error on IO failure.
    void save(const std::string& path) const;

  private:
    void raw(const std::string& s);
    std::string out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
    bool row_open_ = false;
};

/// Minimal RFC 4180 reader with named-column access. Unknown columns are
/// ignored by consumers; missing required columns raise with the name.
class CsvTable {
  public:
    static CsvTable load(const std::string& path);
    static CsvTable parse(const std::string& text, const std::string& origin = "<memory>");

    std::size_t rows() const { return cells_.size(); }
    bool has_column(const std::string& name) const { return index_.count(name) != 0; }

    const std::string& cell(std::size_t row, const std::string& col) const;
    bool empty_cell(std::size_t row, const std::string& col) const;
    double number(std::size_t row, const std::string& col) const;
    std::optional<double> opt_number(std::size_t row, const std::string& col) const;

    /// Throws std::invalid_argument naming the first missing column.
    void require_columns(const std::vector<std::string>& names) const;

  private:
    std::string origin_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<std::string>> cells_;
};

}  // namespace moreas
