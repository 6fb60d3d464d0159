#include "lincache/bench.hpp"

#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

namespace lincache {

namespace {

using I = std::int64_t;

void check_ratio(std::size_t z, std::size_t q) {
    if (q < 2 || z < 1 || z >= q) throw InvalidArgument("bench ratio z/q needs 1 <= z < q");
}

BigInt binomial(std::size_t n, std::size_t k) {
    BigInt r = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

BigInt power(std::size_t b, std::size_t e) {
    BigInt r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= b;
    return r;
}

BenchRow base(const char* label, std::size_t users, std::size_t z, std::size_t q) {
    check_ratio(z, q);
    BenchRow row;
    row.label = label;
    row.users = users;
    row.q = q;
    row.z = z;
    row.cache_fraction = Rational(static_cast<I>(z), static_cast<I>(q));
    return row;
}

} // namespace

BenchRow mn_row(std::size_t users, std::size_t z, std::size_t q) {
    BenchRow row = base("MN", users, z, q);
    const Rational t = row.cache_fraction * static_cast<I>(users);
    if (t.denominator() != 1) return row;
    row.rate = Rational(static_cast<I>(users)) * (Rational(1) - row.cache_fraction) / (Rational(1) + t);
    row.packets = binomial(users, static_cast<std::size_t>(t.numerator()));
    return row;
}

BenchRow yan_row(std::size_t users, std::size_t z, std::size_t q) {
    BenchRow row = base("YanLemma2", users, z, q);
    const auto qq = static_cast<std::size_t>(row.cache_fraction.denominator());
    const auto zz = static_cast<std::size_t>(row.cache_fraction.numerator());
    row.q = qq;
    row.z = zz;
    if (users % qq != 0 || users < qq) return row;
    if (zz == 1)
        row.rate = Rational(static_cast<I>(qq - 1));
    else if (zz == qq - 1)
        row.rate = Rational(1, static_cast<I>(qq - 1));
    else
        return row;
    row.packets = power(qq, users / qq - 1);
    return row;
}

BenchRow theorem3_row(std::size_t users, std::size_t z, std::size_t q) {
    BenchRow row = base("Theorem3", users, z, q);
    const std::size_t per_m = (q + 1) * ((q - 1) / (q - z));
    if (users % per_m != 0 || users == 0) return row;
    row.rate = Rational(static_cast<I>(q - z));
    row.packets = power(q, users / per_m);
    return row;
}

std::optional<BenchRow> composed_row(std::size_t users, std::size_t z, std::size_t q) {
    check_ratio(z, q);
    const std::size_t per_m = (q + 1) * ((q - 1) / (q - z));
    const std::size_t m = users / per_m;
    if (m == 0 || users % per_m == 0) return std::nullopt;
    const std::size_t k1 = m * per_m, k2 = users - k1;
    const std::size_t h1 = k1 / std::gcd(k1, k2);
    BenchRow row = base("composed", users, z, q);
    row.rate = Rational(static_cast<I>(q - z)) * Rational(static_cast<I>(users), static_cast<I>(k1));
    row.packets = power(q, m) * h1;
    return row;
}

std::vector<BenchRow> bench_rows(std::size_t z, std::size_t q, const std::vector<std::size_t>& users) {
    check_ratio(z, q);
    std::vector<BenchRow> rows;
    for (auto k : users) {
        if (k == 0) throw InvalidArgument("bench: K must be positive");
        rows.push_back(mn_row(k, z, q));
        rows.push_back(yan_row(k, z, q));
        rows.push_back(theorem3_row(k, z, q));
        if (auto c = composed_row(k, z, q)) rows.push_back(*c);
    }
    return rows;
}

std::string decimal4(const Rational& r) {
    // round half away from zero at the 4th decimal, in exact arithmetic
    const bool neg = r < 0;
    const Rational a = neg ? -r : r;
    const I scaled = (a.numerator() * 20000 / a.denominator() + 1) / 2;
    std::ostringstream os;
    os << (neg ? "-" : "") << scaled / 10000 << '.' << std::setw(4) << std::setfill('0') << scaled % 10000;
    return os.str();
}

void write_bench_table(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << std::left << std::setw(10) << "scheme" << std::right << std::setw(5) << "K" << std::setw(6) << "M/N"
       << std::setw(10) << "R" << std::setw(9) << "R~" << "  F\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(10) << r.label << std::right << std::setw(5) << r.users << std::setw(6)
           << to_string(r.cache_fraction);
        if (r.rate)
            os << std::setw(10) << to_string(*r.rate) << std::setw(9) << decimal4(*r.rate) << "  " << r.packets;
        else
            os << std::setw(10) << "N/A" << std::setw(9) << "N/A" << "  N/A";
        os << '\n';
    }
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
    os << "label,K,q,z,MN_num,MN_den,R_num,R_den,F\n";
    for (const auto& r : rows) {
        os << r.label << ',' << r.users << ',' << r.q << ',' << r.z << ',' << r.cache_fraction.numerator() << ','
           << r.cache_fraction.denominator() << ',';
        if (r.rate)
            os << r.rate->numerator() << ',' << r.rate->denominator() << ',' << r.packets;
        else
            os << "NA,NA,NA";
        os << '\n';
    }
}

} // namespace lincache
