// GF(2^q) tables and the combinatorial helpers built on them.
//
// Primitive polynomials, fixed per q (x is a generator for every choice):
//   q=1: x + 1                 (0x3, degenerate: GF(2))
//   q=2: x^2 + x + 1           (0x7)
//   q=3: x^3 + x + 1           (0xB)
//   q=4: x^4 + x + 1           (0x13)
//   q=5: x^5 + x^2 + 1         (0x25)
//   q=6: x^6 + x + 1           (0x43)
//   q=7: x^7 + x^3 + 1         (0x89)
//   q=8: x^8 + x^4 + x^3 + x^2 + 1  (0x11D)

#include "nbqp/field.hpp"

#include <bit>

namespace nbqp {

namespace {

constexpr unsigned kPoly[9] = {0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11D};

// Schoolbook carry-less multiply with reduction; used only to seed the tables.
unsigned clmul_mod(unsigned a, unsigned b, int q, unsigned poly) {
    unsigned r = 0;
    while (b) {
        if (b & 1u) r ^= a;
        a <<= 1;
        if (a & (1u << q)) a ^= poly;
        b >>= 1;
    }
    return r;
}

} // namespace

FieldContext make_field(int q) {
    if (q < 1 || q > 8)
        throw std::invalid_argument("field exponent q must be in [1,8]");
    FieldContext ctx;
    ctx.q = q;
    ctx.primitive_poly = kPoly[q];
    const int size = 1 << q;
    ctx.log_table.assign(size, 0);
    ctx.antilog_table.assign(size, 0);
    unsigned e = 1;
    for (int i = 0; i < size - 1; ++i) {
        ctx.antilog_table[i] = static_cast<gf_t>(e);
        ctx.log_table[e] = static_cast<gf_t>(i);
        e = clmul_mod(e, 2, q, ctx.primitive_poly); // step by the generator x
    }
    return ctx;
}

gf_t gf_mul(gf_t a, gf_t b, const FieldContext& ctx) {
    if (a == 0 || b == 0) return 0;
    const int n = ctx.nonzero();
    int s = ctx.log_table[a] + ctx.log_table[b];
    if (s >= n) s -= n;
    return ctx.antilog_table[s];
}

gf_t gf_inv(gf_t a, const FieldContext& ctx) {
    if (a == 0) throw std::invalid_argument("zero has no multiplicative inverse");
    const int n = ctx.nonzero();
    return ctx.antilog_table[(n - ctx.log_table[a]) % n];
}

std::vector<std::uint8_t> symbol_to_binary(gf_t u, const FieldContext& ctx) {
    std::vector<std::uint8_t> x(ctx.nonzero(), 0);
    if (u != 0) x.at(u - 1) = 1;
    return x;
}

std::vector<std::uint8_t> SymbolPermutation::apply(const std::vector<std::uint8_t>& x) const {
    std::vector<std::uint8_t> y(size, 0);
    for (int j = 1; j <= size; ++j) y[image[j - 1] - 1] = x[j - 1];
    return y;
}

std::vector<std::vector<std::uint8_t>> SymbolPermutation::dense() const {
    std::vector<std::vector<std::uint8_t>> d(size, std::vector<std::uint8_t>(size, 0));
    for (int j = 1; j <= size; ++j) d[image[j - 1] - 1][j - 1] = 1;
    return d;
}

SymbolPermutation permutation_matrix(gf_t h, const FieldContext& ctx) {
    if (h == 0) throw std::invalid_argument("permutation requires a nonzero multiplier");
    SymbolPermutation p;
    p.size = ctx.nonzero();
    p.image.resize(p.size);
    for (int j = 1; j <= p.size; ++j)
        p.image[j - 1] = gf_mul(h, static_cast<gf_t>(j), ctx);
    return p;
}

BitMatrix bit_matrix(const FieldContext& ctx) {
    BitMatrix b;
    b.rows = ctx.q;
    b.cols = ctx.nonzero();
    b.data.assign(b.rows, std::vector<std::uint8_t>(b.cols, 0));
    for (int i = 0; i < b.rows; ++i)
        for (int j = 1; j <= b.cols; ++j)
            b.data[i][j - 1] = static_cast<std::uint8_t>((j >> i) & 1);
    return b;
}

std::vector<std::uint8_t> bit_row_after_permutation(gf_t l, gf_t h, const FieldContext& ctx) {
    if (l == 0 || h == 0)
        throw std::invalid_argument("bit_row_after_permutation requires nonzero l and h");
    const int n = ctx.nonzero();
    std::vector<std::uint8_t> r(n, 0);
    for (int j = 1; j <= n; ++j) {
        const unsigned prod = gf_mul(static_cast<gf_t>(j), h, ctx);
        r[j - 1] = static_cast<std::uint8_t>(std::popcount(l & prod) & 1u);
    }
    return r;
}

} // namespace nbqp
