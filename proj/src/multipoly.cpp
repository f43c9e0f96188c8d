#include "nambu/multipoly.hpp"

#include <cmath>
#include <stdexcept>

namespace nambu {

MultiPoly MultiPoly::constant(int nvars, double c) {
    MultiPoly p(nvars);
    p.add_term(std::vector<int>(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int nvars, int j) {
    if (j < 0 || j >= nvars) throw std::invalid_argument("MultiPoly: variable index");
    MultiPoly p(nvars);
    std::vector<int> e(nvars, 0);
    e[j] = 1;
    p.add_term(std::move(e), 1.0);
    return p;
}

void MultiPoly::add_term(std::vector<int> expo, double coeff) {
    if (static_cast<int>(expo.size()) != nvars_)
        throw std::invalid_argument("MultiPoly: exponent tuple length");
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.emplace(std::move(expo), coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

double MultiPoly::operator()(std::span<const double> X) const {
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double t = c;
        for (int j = 0; j < nvars_; ++j)
            for (int k = 0; k < e[j]; ++k) t *= X[j];
        sum += t;
    }
    return sum;
}

MultiPoly MultiPoly::partial(int j) const {
    MultiPoly d(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[j] == 0) continue;
        std::vector<int> de = e;
        de[j] -= 1;
        d.add_term(std::move(de), c * e[j]);
    }
    return d;
}

MultiPoly MultiPoly::operator+(const MultiPoly& q) const {
    MultiPoly r = *this;
    for (const auto& [e, c] : q.terms_) r.add_term(e, c);
    return r;
}

MultiPoly MultiPoly::operator*(const MultiPoly& q) const {
    MultiPoly r(nvars_);
    for (const auto& [ea, ca] : terms_)
        for (const auto& [eb, cb] : q.terms_) {
            std::vector<int> e(nvars_);
            for (int j = 0; j < nvars_; ++j) e[j] = ea[j] + eb[j];
            r.add_term(std::move(e), ca * cb);
        }
    return r;
}

MultiPoly MultiPoly::operator*(double s) const {
    MultiPoly r(nvars_);
    if (s == 0.0) return r;
    for (const auto& [e, c] : terms_) r.add_term(e, c * s);
    return r;
}

std::vector<double> grad(const MultiPoly& p, std::span<const double> X) {
    std::vector<double> g(p.nvars(), 0.0);
    for (const auto& [e, c] : p.terms()) {
        for (int j = 0; j < p.nvars(); ++j) {
            if (e[j] == 0) continue;
            double t = c * e[j];
            for (int k = 0; k < p.nvars(); ++k) {
                const int pw = (k == j) ? e[k] - 1 : e[k];
                for (int q = 0; q < pw; ++q) t *= X[k];
            }
            g[j] += t;
        }
    }
    return g;
}

MultiPoly elementary_symmetric_poly(int nvars, int k) {
    if (k < 0 || k > nvars) throw std::invalid_argument("elementary_symmetric_poly: k");
    MultiPoly p(nvars);
    if (k == 0) return MultiPoly::constant(nvars, 1.0);
    std::vector<int> pick(k);
    for (int j = 0; j < k; ++j) pick[j] = j;
    while (true) {
        std::vector<int> e(nvars, 0);
        for (int j : pick) e[j] = 1;
        p.add_term(std::move(e), 1.0);
        int j = k - 1;
        while (j >= 0 && pick[j] == nvars - k + j) --j;
        if (j < 0) break;
        ++pick[j];
        for (int l = j + 1; l < k; ++l) pick[l] = pick[l - 1] + 1;
    }
    return p;
}

} // namespace nambu
