#include "flagflow/polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace flagflow {

namespace {

double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace

Polynomial3::Polynomial3(std::vector<Monomial> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (t.exp[0] < 0 || t.exp[1] < 0 || t.exp[2] < 0) {
      throw std::invalid_argument("Polynomial3: negative exponent");
    }
  }
  normalize();
}

Polynomial3 Polynomial3::constant(double c) { return Polynomial3(std::vector<Monomial>{{c, {0, 0, 0}}}); }

Polynomial3 Polynomial3::variable(int index) {
  if (index < 0 || index > 2) throw std::out_of_range("Polynomial3::variable: index");
  Exponents e{0, 0, 0};
  e[static_cast<std::size_t>(index)] = 1;
  return Polynomial3(std::vector<Monomial>{{1.0, e}});
}

void Polynomial3::normalize() {
  std::sort(terms_.begin(), terms_.end(),
            [](const Monomial& a, const Monomial& b) { return a.exp < b.exp; });
  std::vector<Monomial> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().exp == t.exp) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Monomial& m) { return m.coef == 0.0; });
  terms_ = std::move(merged);
}

int Polynomial3::degree() const {
  int d = -1;
  for (const auto& t : terms_) d = std::max(d, t.degree());
  return d;
}

double Polynomial3::operator()(const Vec3& x) const {
  double sum = 0.0;
  for (const auto& t : terms_) {
    sum += t.coef * ipow(x[0], t.exp[0]) * ipow(x[1], t.exp[1]) * ipow(x[2], t.exp[2]);
  }
  return sum;
}

Polynomial3 Polynomial3::derivative(int index) const {
  const auto k = static_cast<std::size_t>(index);
  std::vector<Monomial> out;
  for (const auto& t : terms_) {
    if (t.exp[k] == 0) continue;
    Monomial m = t;
    m.coef *= t.exp[k];
    m.exp[k] -= 1;
    out.push_back(m);
  }
  return Polynomial3(std::move(out));
}

Vec3 Polynomial3::gradient(const Vec3& x) const {
  return {derivative(0)(x), derivative(1)(x), derivative(2)(x)};
}

Polynomial3& Polynomial3::operator+=(const Polynomial3& other) {
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  normalize();
  return *this;
}

Polynomial3& Polynomial3::operator-=(const Polynomial3& other) {
  for (auto t : other.terms_) {
    t.coef = -t.coef;
    terms_.push_back(t);
  }
  normalize();
  return *this;
}

Polynomial3& Polynomial3::operator*=(double s) {
  for (auto& t : terms_) t.coef *= s;
  normalize();
  return *this;
}

Polynomial3 operator*(const Polynomial3& a, const Polynomial3& b) {
  std::vector<Monomial> out;
  out.reserve(a.terms().size() * b.terms().size());
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      out.push_back({ta.coef * tb.coef,
                     {ta.exp[0] + tb.exp[0], ta.exp[1] + tb.exp[1], ta.exp[2] + tb.exp[2]}});
    }
  }
  return Polynomial3(std::move(out));
}

PolyField3::PolyField3(std::array<Polynomial3, 3> components) : components_(std::move(components)) {
  degree_ = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    degree_ = std::max(degree_, components_[i].degree());
    for (int j = 0; j < 3; ++j) partials_[i][static_cast<std::size_t>(j)] = components_[i].derivative(j);
  }
}

Vec3 PolyField3::operator()(const Vec3& x) const {
  return {components_[0](x), components_[1](x), components_[2](x)};
}

Mat3 PolyField3::jacobian(const Vec3& x) const {
  Mat3 j;
  for (std::size_t r = 0; r < 3; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      j(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = partials_[r][c](x);
    }
  }
  return j;
}

}  // namespace flagflow
