/**
 * @file gf2.hpp
 * @brief Small dense binary matrices and vectors over GF(2).
 *
 * Everything here is sized for network-coding mappings: at most 8 rows and 8 columns, one byte per row.
 * Bit order is "first entry most significant" throughout, so a matrix's bit pattern read row-major is an
 * ordinary unsigned counter. enumerate_matrices() walks that counter upwards, which makes every search
 * built on top of it deterministic.
 */

#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <optional>
#include <ostream>
#include <ranges>
#include <string>
#include <string_view>
#include <vector>

#include "netcom/error.hpp"

namespace netcom::gf2 {

inline constexpr std::size_t max_dim = 8;

class Vector {
  public:
    Vector() = default;

    /// @p bits holds the entries with entry 0 in the most significant of the @p len low bits.
    explicit Vector(std::size_t len, std::uint32_t bits = 0) : len_{static_cast<std::uint8_t>(len)} {
        if (len < 1 || len > max_dim) {
            throw argument_error("gf2::Vector length must be in [1, 8], got " + std::to_string(len));
        }
        bits_ = static_cast<std::uint8_t>(bits & mask());
    }

    static Vector from_entries(std::initializer_list<int> entries) {
        Vector v(entries.size());
        std::size_t i = 0;
        for (int e : entries) {
            v.set(i++, e);
        }
        return v;
    }

    [[nodiscard]] std::size_t size() const noexcept { return len_; }
    [[nodiscard]] std::uint8_t bits() const noexcept { return bits_; }

    [[nodiscard]] int operator[](std::size_t i) const noexcept { return (bits_ >> (len_ - 1 - i)) & 1; }

    void set(std::size_t i, int value) {
        if (i >= len_) {
            throw argument_error("gf2::Vector index out of range");
        }
        const auto b = static_cast<std::uint8_t>(1U << (len_ - 1 - i));
        bits_ = (value & 1) ? static_cast<std::uint8_t>(bits_ | b) : static_cast<std::uint8_t>(bits_ & ~b);
    }

    /// Concatenation a ‖ b.
    [[nodiscard]] friend Vector concat(const Vector& a, const Vector& b) {
        return Vector(a.size() + b.size(), (static_cast<std::uint32_t>(a.bits_) << b.len_) | b.bits_);
    }

    friend bool operator==(const Vector&, const Vector&) = default;

  private:
    [[nodiscard]] std::uint32_t mask() const noexcept { return (1U << len_) - 1U; }

    std::uint8_t len_ = 0;
    std::uint8_t bits_ = 0;
};

class Matrix {
  public:
    Matrix() = default;

    /// Zero matrix.
    Matrix(std::size_t rows, std::size_t cols) : rows_{static_cast<std::uint8_t>(rows)}, cols_{static_cast<std::uint8_t>(cols)} {
        if (rows < 1 || rows > max_dim || cols < 1 || cols > max_dim) {
            throw argument_error("gf2::Matrix dimensions must be in [1, 8], got " + std::to_string(rows) + "x" +
                                 std::to_string(cols));
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m.set(i, i, 1);
        }
        return m;
    }

    /// Rows given as '0'/'1' strings, e.g. {"0100", "1000"}.
    static Matrix from_rows(std::initializer_list<std::string_view> rows) {
        return from_rows(std::vector<std::string_view>(rows));
    }

    static Matrix from_rows(const std::vector<std::string_view>& rows) {
        if (rows.empty()) {
            throw argument_error("gf2::Matrix needs at least one row");
        }
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols()) {
                throw argument_error("gf2::Matrix rows have unequal length");
            }
            for (std::size_t c = 0; c < m.cols(); ++c) {
                const char ch = rows[r][c];
                if (ch != '0' && ch != '1') {
                    throw argument_error(std::string("gf2::Matrix entry must be '0' or '1', got '") + ch + "'");
                }
                m.set(r, c, ch - '0');
            }
        }
        return m;
    }

    /// Inverse of pattern(): entry (0,0) is the most significant of the rows*cols low bits.
    static Matrix from_pattern(std::size_t rows, std::size_t cols, std::uint64_t pattern) {
        Matrix m(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
            const std::size_t shift = (rows - 1 - r) * cols;
            m.row_[r] = static_cast<std::uint8_t>((pattern >> shift) & ((1U << cols) - 1U));
        }
        return m;
    }

    [[nodiscard]] std::uint64_t pattern() const noexcept {
        std::uint64_t p = 0;
        for (std::size_t r = 0; r < rows_; ++r) {
            p = (p << cols_) | row_[r];
        }
        return p;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    [[nodiscard]] int operator()(std::size_t r, std::size_t c) const noexcept { return (row_[r] >> (cols_ - 1 - c)) & 1; }

    void set(std::size_t r, std::size_t c, int value) {
        if (r >= rows_ || c >= cols_) {
            throw argument_error("gf2::Matrix index out of range");
        }
        const auto b = static_cast<std::uint8_t>(1U << (cols_ - 1 - c));
        row_[r] = (value & 1) ? static_cast<std::uint8_t>(row_[r] | b) : static_cast<std::uint8_t>(row_[r] & ~b);
    }

    /// Row r as a bit mask, column 0 most significant.
    [[nodiscard]] std::uint8_t row_bits(std::size_t r) const noexcept { return row_[r]; }

    [[nodiscard]] Vector row(std::size_t r) const { return Vector(cols_, row_[r]); }

    /// Rows [first, first + count).
    [[nodiscard]] Matrix row_slice(std::size_t first, std::size_t count) const {
        if (first + count > rows_ || count == 0) {
            throw argument_error("gf2::Matrix row slice out of range");
        }
        Matrix m(count, cols_);
        for (std::size_t r = 0; r < count; ++r) {
            m.row_[r] = row_[first + r];
        }
        return m;
    }

    [[nodiscard]] Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                t.set(c, r, (*this)(r, c));
            }
        }
        return t;
    }

    /// [top; bottom]
    [[nodiscard]] friend Matrix stack(const Matrix& top, const Matrix& bottom) {
        if (top.cols() != bottom.cols()) {
            throw argument_error("gf2::stack: column count mismatch");
        }
        Matrix m(top.rows() + bottom.rows(), top.cols());
        for (std::size_t r = 0; r < top.rows(); ++r) {
            m.row_[r] = top.row_[r];
        }
        for (std::size_t r = 0; r < bottom.rows(); ++r) {
            m.row_[top.rows() + r] = bottom.row_[r];
        }
        return m;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

  private:
    std::uint8_t rows_ = 0;
    std::uint8_t cols_ = 0;
    std::array<std::uint8_t, max_dim> row_{};
};

[[nodiscard]] inline Vector multiply(const Matrix& a, const Vector& v) {
    if (a.cols() != v.size()) {
        throw argument_error("gf2::multiply: matrix has " + std::to_string(a.cols()) + " columns but vector has " +
                             std::to_string(v.size()) + " entries");
    }
    std::uint32_t out = 0;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        out = (out << 1) | static_cast<std::uint32_t>(std::popcount(static_cast<unsigned>(a.row_bits(r) & v.bits())) & 1);
    }
    return Vector(a.rows(), out);
}

[[nodiscard]] inline Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw argument_error("gf2::multiply: inner dimensions differ");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        std::uint8_t acc = 0;
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(r, k)) {
                acc ^= b.row_bits(k);
            }
        }
        for (std::size_t c = 0; c < b.cols(); ++c) {
            out.set(r, c, (acc >> (b.cols() - 1 - c)) & 1);
        }
    }
    return out;
}

/// Row-reduction rank over GF(2).
[[nodiscard]] inline std::size_t rank(const Matrix& a) {
    std::array<std::uint8_t, max_dim> rows{};
    for (std::size_t r = 0; r < a.rows(); ++r) {
        rows[r] = a.row_bits(r);
    }
    std::size_t rk = 0;
    for (std::size_t c = 0; c < a.cols() && rk < a.rows(); ++c) {
        const auto bit = static_cast<std::uint8_t>(1U << (a.cols() - 1 - c));
        std::size_t pivot = rk;
        while (pivot < a.rows() && !(rows[pivot] & bit)) {
            ++pivot;
        }
        if (pivot == a.rows()) {
            continue;
        }
        std::swap(rows[rk], rows[pivot]);
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r != rk && (rows[r] & bit)) {
                rows[r] ^= rows[rk];
            }
        }
        ++rk;
    }
    return rk;
}

/// Gauss-Jordan inverse; std::nullopt when @p a is singular.
[[nodiscard]] inline std::optional<Matrix> inverse(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw argument_error("gf2::inverse: matrix is not square");
    }
    const std::size_t n = a.rows();
    // [A | I] packed per row, A in the high n bits.
    std::array<std::uint16_t, max_dim> aug{};
    for (std::size_t r = 0; r < n; ++r) {
        aug[r] = static_cast<std::uint16_t>((a.row_bits(r) << n) | (1U << (n - 1 - r)));
    }
    for (std::size_t c = 0; c < n; ++c) {
        const auto bit = static_cast<std::uint16_t>(1U << (2 * n - 1 - c));
        std::size_t pivot = c;
        while (pivot < n && !(aug[pivot] & bit)) {
            ++pivot;
        }
        if (pivot == n) {
            return std::nullopt;
        }
        std::swap(aug[c], aug[pivot]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r != c && (aug[r] & bit)) {
                aug[r] ^= aug[c];
            }
        }
    }
    Matrix inv(n, n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto low = static_cast<std::uint32_t>(aug[r] & ((1U << n) - 1U));
        for (std::size_t c = 0; c < n; ++c) {
            inv.set(r, c, (low >> (n - 1 - c)) & 1);
        }
    }
    return inv;
}

/**
 * All 2^(rows*cols) matrices of the given shape, each exactly once, in ascending bit-pattern order
 * (the all-zero matrix first). Lazy; requires rows*cols <= 16.
 */
[[nodiscard]] inline auto enumerate_matrices(std::size_t rows, std::size_t cols) {
    if (rows < 1 || cols < 1 || rows > max_dim || cols > max_dim || rows * cols > 16) {
        throw argument_error("gf2::enumerate_matrices: rows*cols must be <= 16");
    }
    const std::uint32_t count = 1U << (rows * cols);
    return std::views::iota(std::uint32_t{0}, count) |
           std::views::transform([rows, cols](std::uint32_t p) { return Matrix::from_pattern(rows, cols, p); });
}

// Text format: one row per line as '0'/'1' characters, blocks separated by a blank line.

inline void write_text(std::ostream& os, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            os << static_cast<char>('0' + m(r, c));
        }
        os << '\n';
    }
}

inline void write_text(std::ostream& os, const std::vector<Matrix>& ms) {
    for (std::size_t i = 0; i < ms.size(); ++i) {
        if (i) {
            os << '\n';
        }
        write_text(os, ms[i]);
    }
}

/// Reads one block (stops at a blank line or EOF). Returns std::nullopt when no rows remain.
[[nodiscard]] inline std::optional<Matrix> read_block(std::istream& is) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            if (lines.empty()) {
                continue;
            }
            break;
        }
        lines.push_back(line);
    }
    if (lines.empty()) {
        return std::nullopt;
    }
    try {
        std::vector<std::string_view> views(lines.begin(), lines.end());
        return Matrix::from_rows(views);
    } catch (const argument_error& e) {
        throw parse_error(std::string("malformed matrix block: ") + e.what());
    }
}

[[nodiscard]] inline std::vector<Matrix> read_text(std::istream& is) {
    std::vector<Matrix> out;
    while (auto m = read_block(is)) {
        out.push_back(*m);
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << (r ? ";" : "[");
        for (std::size_t c = 0; c < m.cols(); ++c) {
            os << m(r, c);
        }
    }
    return os << ']';
}

inline std::ostream& operator<<(std::ostream& os, const Vector& v) {
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i) {
        os << (i ? "," : "") << v[i];
    }
    return os << ')';
}

}  // namespace netcom::gf2
