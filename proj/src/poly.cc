// SPDX-License-Identifier: Apache-2.0
#include "shyps/poly.h"

#include <bit>
#include <stdexcept>

namespace shyps {

Poly Poly::monomial(size_t degree) {
    Poly p;
    p.set_coeff(degree, true);
    return p;
}

Poly Poly::from_exponents(const std::vector<size_t> &exponents) {
    Poly p;
    for (size_t e : exponents) {
        p.set_coeff(e, !p.coeff(e));
    }
    return p;
}

long Poly::degree() const {
    for (size_t k = w_.size(); k-- > 0;) {
        if (w_[k]) {
            return static_cast<long>(k * 64 + 63 - std::countl_zero(w_[k]));
        }
    }
    return -1;
}

bool Poly::coeff(size_t i) const { return (i >> 6) < w_.size() && ((w_[i >> 6] >> (i & 63)) & 1); }

void Poly::set_coeff(size_t i, bool v) {
    if ((i >> 6) >= w_.size()) {
        if (!v) {
            return;
        }
        w_.resize((i >> 6) + 1, 0);
    }
    uint64_t m = uint64_t{1} << (i & 63);
    w_[i >> 6] = v ? (w_[i >> 6] | m) : (w_[i >> 6] & ~m);
    trim();
}

void Poly::trim() {
    while (!w_.empty() && w_.back() == 0) {
        w_.pop_back();
    }
}

Poly &Poly::operator+=(const Poly &o) {
    if (o.w_.size() > w_.size()) {
        w_.resize(o.w_.size(), 0);
    }
    for (size_t k = 0; k < o.w_.size(); k++) {
        w_[k] ^= o.w_[k];
    }
    trim();
    return *this;
}

Poly Poly::operator+(const Poly &o) const {
    Poly out = *this;
    out += o;
    return out;
}

Poly Poly::operator*(const Poly &o) const {
    Poly out;
    if (is_zero() || o.is_zero()) {
        return out;
    }
    out.w_.assign(w_.size() + o.w_.size() + 1, 0);
    for (size_t k = 0; k < w_.size(); k++) {
        uint64_t word = w_[k];
        while (word) {
            size_t i = k * 64 + std::countr_zero(word);
            word &= word - 1;
            size_t shift_words = i >> 6, shift_bits = i & 63;
            for (size_t q = 0; q < o.w_.size(); q++) {
                out.w_[q + shift_words] ^= o.w_[q] << shift_bits;
                if (shift_bits) {
                    out.w_[q + shift_words + 1] ^= o.w_[q] >> (64 - shift_bits);
                }
            }
        }
    }
    out.trim();
    return out;
}

bool Poly::operator==(const Poly &o) const {
    Poly a = *this, b = o;
    a.trim();
    b.trim();
    return a.w_ == b.w_;
}

std::string Poly::str() const {
    if (is_zero()) {
        return "0";
    }
    std::string s;
    for (long i = degree(); i >= 0; i--) {
        if (!coeff(static_cast<size_t>(i))) {
            continue;
        }
        if (!s.empty()) {
            s += "+";
        }
        if (i == 0) {
            s += "1";
        } else if (i == 1) {
            s += "x";
        } else {
            s += "x^" + std::to_string(i);
        }
    }
    return s;
}

void divmod(const Poly &a, const Poly &b, Poly &quot, Poly &rem) {
    long db = b.degree();
    if (db < 0) {
        throw std::domain_error("Poly division by zero");
    }
    quot = Poly();
    rem = a;
    for (long d = rem.degree(); d >= db; d = rem.degree()) {
        size_t shift = static_cast<size_t>(d - db);
        quot.set_coeff(shift, !quot.coeff(shift));
        rem += b * Poly::monomial(shift);
    }
}

Poly operator%(const Poly &a, const Poly &b) {
    Poly q, r;
    divmod(a, b, q, r);
    return r;
}

Poly operator/(const Poly &a, const Poly &b) {
    Poly q, r;
    divmod(a, b, q, r);
    return q;
}

Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        Poly r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

Poly mulmod(const Poly &a, const Poly &b, const Poly &m) { return (a * b) % m; }

Poly powmod(const Poly &base, uint64_t e, const Poly &m) {
    Poly result = Poly::one() % m;
    Poly b = base % m;
    while (e) {
        if (e & 1) {
            result = mulmod(result, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    return result;
}

}  // namespace shyps
