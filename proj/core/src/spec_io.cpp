#include "qplab/spec_io.hpp"

#include <cstdio>
#include <fstream>

namespace qplab {

namespace {

using nlohmann::json;

std::vector<double> number_list(const json& j, const char* field) {
  std::vector<double> out;
  if (j.is_number()) {
    out.push_back(j.get<double>());
    return out;
  }
  if (!j.is_array())
    throw std::invalid_argument(std::string("spec json: ") + field + " must be a number or array");
  for (const auto& x : j) out.push_back(x.get<double>());
  return out;
}

}  // namespace

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json to_json(const FourierPotential& f) {
  json j;
  if (f.dimension() == 1) {
    j["cos"] = f.cos_series();
    j["sin"] = f.sin_series();
    if (f.constant_term() != 0.0) j["constant"] = f.constant_term();
    return j;
  }
  json harmonics = json::array();
  for (const auto& h : f.harmonics()) {
    harmonics.push_back({{"k", h.index}, {"re", h.amplitude.real()}, {"im", h.amplitude.imag()}});
  }
  if (f.constant_term() != 0.0)
    harmonics.push_back({{"k", std::vector<int>(static_cast<std::size_t>(f.dimension()), 0)},
                         {"re", f.constant_term()},
                         {"im", 0.0}});
  j["harmonics"] = harmonics;
  return j;
}

FourierPotential potential_from_json(const json& j) {
  if (j.contains("harmonics")) {
    std::vector<Harmonic> hs;
    int dim = 0;
    for (const auto& h : j.at("harmonics")) {
      Harmonic out;
      out.index = h.at("k").get<std::vector<int>>();
      out.amplitude = {h.value("re", 0.0), h.value("im", 0.0)};
      dim = static_cast<int>(out.index.size());
      hs.push_back(std::move(out));
    }
    if (dim == 0) throw std::invalid_argument("spec json: empty harmonics list");
    return FourierPotential::from_harmonics(dim, std::move(hs));
  }
  if (!j.contains("cos"))
    throw std::invalid_argument("spec json: potential needs 'cos' or 'harmonics'");
  std::vector<double> cosc = j.at("cos").get<std::vector<double>>();
  std::vector<double> sinc =
      j.contains("sin") ? j.at("sin").get<std::vector<double>>() : std::vector<double>{};
  return FourierPotential::from_series(std::move(cosc), std::move(sinc), j.value("constant", 0.0));
}

json to_json(const OperatorSpec& spec) {
  json j;
  switch (spec.geometry) {
    case Geometry::Line: j["geometry"] = "line"; break;
    case Geometry::Strip: j["geometry"] = "strip"; break;
    case Geometry::Box2D: j["geometry"] = "box2d"; break;
  }
  j["lambda"] = spec.coupling;
  if (spec.diagonal_only) j["diagonal"] = true;
  if (spec.geometry == Geometry::Strip) {
    json rows = json::array();
    for (const auto& f : spec.potentials) rows.push_back(to_json(f));
    j["strip_potentials"] = rows;
  } else {
    j["potential"] = to_json(spec.potential());
  }
  j["frequency"] = spec.frequency.components();
  j["phase"] = spec.phase;
  switch (spec.orbit.kind()) {
    case OrbitKind::Shift: j["orbit"] = {{"kind", "shift"}}; break;
    case OrbitKind::SkewShift: j["orbit"] = {{"kind", "skew_shift"}}; break;
    case OrbitKind::MonomialPhase:
      j["orbit"] = {{"kind", "monomial"}, {"sigma", spec.orbit.sigma()}, {"alpha", spec.orbit.alpha()}};
      break;
  }
  return j;
}

OperatorSpec operator_spec_from_json(const json& j) {
  OperatorSpec spec;
  const std::string geometry = j.value("geometry", "line");
  if (geometry == "line")
    spec.geometry = Geometry::Line;
  else if (geometry == "strip")
    spec.geometry = Geometry::Strip;
  else if (geometry == "box2d")
    spec.geometry = Geometry::Box2D;
  else
    throw std::invalid_argument("spec json: unknown geometry '" + geometry + "'");

  if (!j.contains("lambda")) throw std::invalid_argument("spec json: missing 'lambda'");
  spec.coupling = j.at("lambda").get<double>();
  spec.diagonal_only = j.value("diagonal", false);

  if (spec.geometry == Geometry::Strip) {
    if (!j.contains("strip_potentials"))
      throw std::invalid_argument("spec json: strips need 'strip_potentials'");
    for (const auto& p : j.at("strip_potentials")) spec.potentials.push_back(potential_from_json(p));
  } else {
    if (!j.contains("potential")) throw std::invalid_argument("spec json: missing 'potential'");
    spec.potentials = {potential_from_json(j.at("potential"))};
  }

  if (!j.contains("frequency")) throw std::invalid_argument("spec json: missing 'frequency'");
  spec.frequency = FrequencyVector(number_list(j.at("frequency"), "frequency"));
  spec.phase = j.contains("phase")
                   ? number_list(j.at("phase"), "phase")
                   : std::vector<double>(static_cast<std::size_t>(spec.frequency.dimension()), 0.0);
  for (double& p : spec.phase) p = frac_unit(p);

  const json orbit = j.value("orbit", json{{"kind", "shift"}});
  const std::string kind = orbit.value("kind", "shift");
  if (kind == "shift")
    spec.orbit = OrbitGenerator::shift(spec.frequency);
  else if (kind == "skew_shift")
    spec.orbit = OrbitGenerator::skew_shift(spec.frequency[0]);
  else if (kind == "monomial")
    spec.orbit = OrbitGenerator::monomial_phase(orbit.at("sigma").get<double>(),
                                                orbit.at("alpha").get<double>());
  else
    throw std::invalid_argument("spec json: unknown orbit kind '" + kind + "'");

  spec.validate();
  return spec;
}

OperatorSpec load_operator_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  return operator_spec_from_json(j);
}

json to_json(const KickedRotorSpec& spec) {
  return {{"kappa", spec.kappa}, {"a", spec.a}, {"b", spec.b}};
}

KickedRotorSpec rotor_spec_from_json(const json& j) {
  KickedRotorSpec spec;
  spec.kappa = j.value("kappa", 0.0);
  spec.a = j.value("a", 0.0);
  spec.b = j.value("b", 0.0);
  if (spec.kappa < 0.0) throw std::invalid_argument("rotor json: kappa must be >= 0");
  return spec;
}

KickedRotorSpec load_rotor_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open rotor spec file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("bad JSON in " + path + ": " + e.what());
  }
  return rotor_spec_from_json(j);
}

}  // namespace qplab
