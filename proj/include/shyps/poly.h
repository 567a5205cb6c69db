// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace shyps {

/// Polynomial over GF(2); bit i of the packed words is the coefficient of x^i.
class Poly {
  public:
    Poly() = default;
    static Poly monomial(size_t degree);
    static Poly from_exponents(const std::vector<size_t> &exponents);
    static Poly one() { return monomial(0); }
    static Poly x() { return monomial(1); }

    /// Degree of the zero polynomial is -1.
    long degree() const;
    bool is_zero() const { return degree() < 0; }
    bool is_one() const { return degree() == 0; }
    bool coeff(size_t i) const;
    void set_coeff(size_t i, bool v);

    Poly operator+(const Poly &o) const;
    Poly &operator+=(const Poly &o);
    Poly operator*(const Poly &o) const;
    bool operator==(const Poly &o) const;
    bool operator!=(const Poly &o) const { return !(*this == o); }

    std::string str() const;

  private:
    void trim();
    std::vector<uint64_t> w_;
};

void divmod(const Poly &a, const Poly &b, Poly &quot, Poly &rem);
Poly operator%(const Poly &a, const Poly &b);
Poly operator/(const Poly &a, const Poly &b);
Poly gcd(Poly a, Poly b);
Poly mulmod(const Poly &a, const Poly &b, const Poly &m);
Poly powmod(const Poly &base, uint64_t e, const Poly &m);

}  // namespace shyps
