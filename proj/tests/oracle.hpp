#pragma once

// Reference implementation used as an oracle: string rewriting with rational
// numbers at a fixed parameter point, diagonal twists given by per-letter
// scalars. Shares no code with the engine.

#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Q = mpq_class;
using Elem = std::map<std::string, Q>;
using Terms = std::vector<std::pair<Q, std::string>>;

inline void accumulate(Elem& into, const std::string& w, const Q& c) {
  if (c == 0) return;
  Q& slot = into[w];
  slot += c;
  if (slot == 0) into.erase(w);
}

struct Rewriter {
  std::map<std::string, Terms> rules;  // two-letter left-hand sides

  Elem reduce(const std::string& w) const {
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      auto it = rules.find(w.substr(i, 2));
      if (it == rules.end()) continue;
      Elem out;
      for (const auto& [c, rhs] : it->second) {
        for (const auto& [w2, c2] : reduce(w.substr(0, i) + rhs + w.substr(i + 2))) {
          accumulate(out, w2, c * c2);
        }
      }
      return out;
    }
    return Elem{{w, Q(1)}};
  }

  Elem reduce(const Elem& e) const {
    Elem out;
    for (const auto& [w, c] : e) {
      for (const auto& [w2, c2] : reduce(w)) accumulate(out, w2, c * c2);
    }
    return out;
  }

  Elem mul(const Elem& a, const Elem& b) const {
    Elem out;
    for (const auto& [wa, ca] : a) {
      for (const auto& [wb, cb] : b) accumulate(out, wa + wb, ca * cb);
    }
    return reduce(out);
  }
};

inline Elem sub(Elem a, const Elem& b) {
  for (const auto& [w, c] : b) accumulate(a, w, -c);
  return a;
}

inline Elem scaled(const Elem& a, const Q& s) {
  Elem out;
  for (const auto& [w, c] : a) accumulate(out, w, c * s);
  return out;
}

// Forms: coefficient word on the left of a theta string ("01" = theta0 theta1).
using Form = std::map<std::pair<std::string, std::string>, Q>;

struct Calculus {
  Rewriter algebra;
  Rewriter theta;  // letters '0', '1', ...
  // twist[s][g]: phi_s(g) = twist[s][g] * g; letters missing are fixed.
  std::vector<std::map<char, Q>> twist;
  std::vector<Elem> weights;

  Q pass_scalar(const std::string& thetas, const std::string& word) const {
    Q out = 1;
    for (char t : thetas) {
      const auto& m = twist.at(static_cast<std::size_t>(t - '0'));
      for (char g : word) {
        auto it = m.find(g);
        if (it != m.end()) out *= it->second;
      }
    }
    return out;
  }

  Form wedge(const Form& a, const Form& b) const {
    Form out;
    for (const auto& [ka, ca] : a) {
      for (const auto& [kb, cb] : b) {
        Q c = ca * cb * pass_scalar(ka.second, kb.first);
        for (const auto& [w, cw] : algebra.reduce(ka.first + kb.first)) {
          for (const auto& [t, ct] : theta.reduce(ka.second + kb.second)) {
            Q& slot = out[{w, t}];
            slot += c * cw * ct;
          }
        }
      }
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
  }

  Form vartheta() const {
    Form out;
    for (std::size_t s = 0; s < weights.size(); ++s) {
      for (const auto& [w, c] : weights[s]) out[{w, std::string(1, static_cast<char>('0' + s))}] += c;
    }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
  }

  // Graded commutator with vartheta on a homogeneous form of grade k.
  Form d(const Form& f, std::size_t k) const {
    Form left = wedge(vartheta(), f);
    Form right = wedge(f, vartheta());
    Q sign = (k % 2 == 0) ? Q(-1) : Q(1);
    for (const auto& [key, c] : right) left[key] += sign * c;
    std::erase_if(left, [](const auto& kv) { return kv.second == 0; });
    return left;
  }
};

inline Form element_form(const Elem& e) {
  Form out;
  for (const auto& [w, c] : e) out[{w, ""}] = c;
  return out;
}

inline Form letter_form(const std::string& w) { return Form{{{w, ""}, Q(1)}}; }

inline Form form_sub(Form a, const Form& b) {
  for (const auto& [k, c] : b) a[k] -= c;
  std::erase_if(a, [](const auto& kv) { return kv.second == 0; });
  return a;
}

inline Form form_scaled(const Form& a, const Q& s) {
  Form out;
  for (const auto& [k, c] : a) out[k] = c * s;
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

inline Form form_add(Form a, const Form& b) {
  for (const auto& [k, c] : b) a[k] += c;
  std::erase_if(a, [](const auto& kv) { return kv.second == 0; });
  return a;
}

// GL_{p,q}(2) at a numeric point with r = p q, letters a < b < c < d.
// `displayed_t4t2` selects theta3 theta1 -> -r theta1 theta3 over the
// sign-only rule.
inline Calculus glpq(const Q& p, const Q& q, bool displayed_t4t2) {
  Q r = p * q;
  Calculus cal;
  auto& R = cal.algebra.rules;
  R["ba"] = {{1 / p, "ab"}};
  R["ca"] = {{1 / q, "ac"}};
  R["cb"] = {{p / q, "bc"}};
  R["db"] = {{1 / q, "bd"}};
  R["dc"] = {{1 / p, "cd"}};
  R["da"] = {{Q(1), "ad"}, {-(p - 1 / q), "bc"}};

  auto& T = cal.theta.rules;
  for (char s = '0'; s < '4'; ++s) T[std::string(2, s)] = {};
  T["10"] = {{-r, "01"}};
  T["20"] = {{-1, "02"}};
  T["21"] = {{-1, "12"}};
  T["30"] = {{-r, "03"}, {p - 1 / q, "12"}};
  T["31"] = {{displayed_t4t2 ? -r : Q(-1), "13"}};
  T["32"] = {{-r, "23"}};

  std::map<char, Q> phi1{{'b', q / p}, {'c', 1 / (q * q)}, {'d', 1 / r}};
  std::map<char, Q> phi2{{'b', 1 / p}, {'c', 1 / q}, {'d', 1 / r}};
  std::map<char, Q> phi4{{'b', 1 / r}, {'d', 1 / r}};
  cal.twist = {phi1, phi2, phi2, phi4};

  Elem D = sub(Elem{{"ad", 1}}, Elem{{"bc", p}});
  D = cal.algebra.reduce(D);
  Q k = q / (1 - r);
  cal.weights = {scaled(D, -k * r), Elem{{"a", -k * r}}, Elem{{"d", k}}, Elem{{"", k * q}}};
  return cal;
}

// Quantum plane xy = q yx, letters x < y, weights 1.
inline Calculus qplane(const Q& q, const Q& r) {
  Calculus cal;
  cal.algebra.rules["yx"] = {{1 / q, "xy"}};
  cal.theta.rules["00"] = {};
  cal.theta.rules["11"] = {};
  cal.theta.rules["10"] = {{Q(-1), "01"}};
  cal.twist = {{{'x', 1 / r}, {'y', 1 / r}}, {{'y', 1 / r}}};
  cal.weights = {Elem{{"", 1}}, Elem{{"", 1}}};
  return cal;
}

}  // namespace oracle
