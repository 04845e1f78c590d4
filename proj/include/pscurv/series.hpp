#pragma once

// Truncated multivariate Taylor series in Wirtinger variables.
//
// A Series in `2m` variables (u_1..u_m, ubar_1..ubar_m) represents the Taylor
// expansion of a function of (z, zbar) about a base point, truncated at total
// degree `order`. The holomorphic and antiholomorphic displacements are
// independent seeds, so conjugation is the exponent swap u^a ubar^b ->
// ubar^a u^b with conjugated coefficients.
//
// Every Series carries a `valid` degree: coefficients of degree <= valid are
// exact (to roundoff). Differentiation lowers it by one; arithmetic takes the
// minimum of its operands.

#include <algorithm>
#include <cassert>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "pscurv/errors.hpp"

namespace pscurv {

using cplx = std::complex<double>;

/// Monomial tables for a fixed (vars, order) pair. Shared and immutable.
class SeriesLayout {
public:
    using Exponents = std::vector<std::uint8_t>;

    static std::shared_ptr<const SeriesLayout> get(int holomorphic_vars, int order) {
        static std::mutex mutex;
        static std::map<std::pair<int, int>, std::shared_ptr<const SeriesLayout>> cache;
        std::lock_guard lock(mutex);
        auto& slot = cache[{holomorphic_vars, order}];
        if (!slot) slot = std::shared_ptr<const SeriesLayout>(new SeriesLayout(holomorphic_vars, order));
        return slot;
    }

    int holomorphic_vars() const noexcept { return m_; }
    int vars() const noexcept { return 2 * m_; }
    int order() const noexcept { return order_; }
    std::size_t size() const noexcept { return exps_.size(); }

    const Exponents& exponents(std::size_t i) const { return exps_[i]; }
    int degree(std::size_t i) const { return degree_[i]; }

    /// Index of a monomial, or -1 when its degree exceeds the order.
    int index_of(const Exponents& e) const {
        auto it = lookup_.find(e);
        return it == lookup_.end() ? -1 : it->second;
    }

    struct Product {
        std::uint32_t other;
        std::uint32_t target;
    };
    const std::vector<Product>& products(std::size_t i) const { return mul_[i]; }

    /// Target index after d/d(var) of monomial i, or -1 when the exponent is 0.
    int derivative_target(int var, std::size_t i) const { return deriv_[var][i]; }
    std::size_t conjugate_index(std::size_t i) const { return conj_[i]; }

    /// Product of factorials of the exponents of monomial i.
    double factorial_weight(std::size_t i) const { return fact_[i]; }

private:
    SeriesLayout(int m, int order) : m_(m), order_(order) {
        const int n = 2 * m;
        Exponents e(n, 0);
        enumerate(e, 0, order);
        std::stable_sort(exps_.begin(), exps_.end(), [](const Exponents& a, const Exponents& b) {
            int da = 0, db = 0;
            for (auto x : a) da += x;
            for (auto x : b) db += x;
            return da < db;
        });
        for (std::size_t i = 0; i < exps_.size(); ++i) {
            lookup_[exps_[i]] = static_cast<int>(i);
            int d = 0;
            double f = 1.0;
            for (auto x : exps_[i]) {
                d += x;
                for (int k = 2; k <= x; ++k) f *= k;
            }
            degree_.push_back(d);
            fact_.push_back(f);
        }
        mul_.resize(exps_.size());
        for (std::size_t i = 0; i < exps_.size(); ++i) {
            for (std::size_t j = 0; j < exps_.size(); ++j) {
                if (degree_[i] + degree_[j] > order_) continue;
                Exponents s(n);
                for (int k = 0; k < n; ++k) s[k] = exps_[i][k] + exps_[j][k];
                mul_[i].push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(lookup_.at(s))});
            }
        }
        deriv_.assign(n, std::vector<int>(exps_.size(), -1));
        for (int v = 0; v < n; ++v) {
            for (std::size_t i = 0; i < exps_.size(); ++i) {
                if (exps_[i][v] == 0) continue;
                Exponents t = exps_[i];
                --t[v];
                deriv_[v][i] = lookup_.at(t);
            }
        }
        conj_.resize(exps_.size());
        for (std::size_t i = 0; i < exps_.size(); ++i) {
            Exponents t(n);
            for (int k = 0; k < m; ++k) {
                t[k] = exps_[i][k + m];
                t[k + m] = exps_[i][k];
            }
            conj_[i] = static_cast<std::size_t>(lookup_.at(t));
        }
    }

    void enumerate(Exponents& e, int pos, int budget) {
        if (pos == static_cast<int>(e.size())) {
            exps_.push_back(e);
            return;
        }
        for (int k = 0; k <= budget; ++k) {
            e[pos] = static_cast<std::uint8_t>(k);
            enumerate(e, pos + 1, budget - k);
        }
        e[pos] = 0;
    }

    int m_;
    int order_;
    std::vector<Exponents> exps_;
    std::vector<int> degree_;
    std::vector<double> fact_;
    std::map<Exponents, int> lookup_;
    std::vector<std::vector<Product>> mul_;
    std::vector<std::vector<int>> deriv_;
    std::vector<std::size_t> conj_;
};

class Series {
public:
    using LayoutPtr = std::shared_ptr<const SeriesLayout>;

    Series() = default;
    Series(LayoutPtr layout, cplx value)
        : layout_(std::move(layout)), c_(layout_->size(), cplx{}), valid_(layout_->order()) {
        c_[0] = value;
    }

    /// The seed series u_k (k < m) or ubar_{k-m} (k >= m) displaced from `base`.
    static Series variable(LayoutPtr layout, int var, cplx base) {
        Series s(layout, base);
        SeriesLayout::Exponents e(layout->vars(), 0);
        e[var] = 1;
        if (layout->order() >= 1) s.c_[layout->index_of(e)] = 1.0;
        return s;
    }

    const LayoutPtr& layout() const noexcept { return layout_; }
    int valid() const noexcept { return valid_; }
    cplx value() const { return c_[0]; }
    std::span<const cplx> coefficients() const { return c_; }

    /// Partial derivative with respect to the given exponent pattern,
    /// evaluated at the base point.
    cplx derivative(const SeriesLayout::Exponents& e) const {
        int idx = layout_->index_of(e);
        assert(idx >= 0);
        assert(layout_->degree(idx) <= valid_);
        return c_[idx] * layout_->factorial_weight(idx);
    }

    Series& operator+=(const Series& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
        valid_ = std::min(valid_, o.valid_);
        return *this;
    }
    Series& operator-=(const Series& o) {
        for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
        valid_ = std::min(valid_, o.valid_);
        return *this;
    }
    Series& operator*=(cplx s) {
        for (auto& x : c_) x *= s;
        return *this;
    }
    Series& operator+=(cplx s) {
        c_[0] += s;
        return *this;
    }

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator-(Series a) {
        for (auto& x : a.c_) x = -x;
        return a;
    }
    friend Series operator*(Series a, cplx s) { return a *= s; }
    friend Series operator*(cplx s, Series a) { return a *= s; }
    friend Series operator+(Series a, cplx s) { return a += s; }
    friend Series operator-(Series a, cplx s) { return a += -s; }

    friend Series operator*(const Series& a, const Series& b) {
        Series out(a.layout_, cplx{});
        const auto& L = *a.layout_;
        for (std::size_t i = 0; i < a.c_.size(); ++i) {
            const cplx ai = a.c_[i];
            if (ai == cplx{}) continue;
            for (const auto& p : L.products(i)) out.c_[p.target] += ai * b.c_[p.other];
        }
        out.valid_ = std::min(a.valid_, b.valid_);
        return out;
    }

    friend Series reciprocal(const Series& a) {
        const cplx c0 = a.c_[0];
        if (c0 == cplx{}) throw DomainError("division by a series with zero constant term");
        // r <- (1 - tail * r) / c0 gains one correct degree per pass.
        Series tail = a;
        tail.c_[0] = 0.0;
        Series r(a.layout_, 1.0 / c0);
        for (int k = 0; k < a.layout_->order(); ++k) {
            Series next = -(tail * r);
            next.c_[0] += 1.0;
            r = next * (1.0 / c0);
        }
        r.valid_ = a.valid_;
        return r;
    }

    friend Series operator/(const Series& a, const Series& b) { return a * reciprocal(b); }

    friend Series conj(const Series& a) {
        Series out(a.layout_, cplx{});
        const auto& L = *a.layout_;
        for (std::size_t i = 0; i < a.c_.size(); ++i) out.c_[L.conjugate_index(i)] = std::conj(a.c_[i]);
        out.valid_ = a.valid_;
        return out;
    }

    friend Series log(const Series& a) {
        const cplx c0 = a.c_[0];
        if (c0 == cplx{}) throw DomainError("log at 0");
        Series x = a * (1.0 / c0);
        x.c_[0] = 0.0;
        Series out(a.layout_, std::log(c0));
        Series power = x;
        for (int k = 1; k <= a.layout_->order(); ++k) {
            out += power * ((k % 2 == 1 ? 1.0 : -1.0) / k);
            power = power * x;
        }
        out.valid_ = a.valid_;
        return out;
    }

    friend Series pow(const Series& a, int exponent) {
        if (exponent < 0) return pow(reciprocal(a), -exponent);
        Series result(a.layout_, 1.0);
        result.valid_ = a.valid_;
        Series base = a;
        while (exponent > 0) {
            if (exponent & 1) result = result * base;
            exponent >>= 1;
            if (exponent) base = base * base;
        }
        return result;
    }

    /// d/d(var); var < m is d/du, var >= m is d/dubar.
    Series diff(int var) const {
        Series out(layout_, cplx{});
        const auto& L = *layout_;
        for (std::size_t i = 0; i < c_.size(); ++i) {
            int t = L.derivative_target(var, i);
            if (t < 0) continue;
            out.c_[t] += c_[i] * static_cast<double>(L.exponents(i)[var]);
        }
        out.valid_ = valid_ - 1;
        return out;
    }

private:
    LayoutPtr layout_;
    std::vector<cplx> c_;
    int valid_ = 0;
};

}  // namespace pscurv
