#include "freehaus/measure_io.hpp"

#include <fstream>
#include <sstream>

#include "freehaus/errors.hpp"

namespace freehaus {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InvalidMeasure(path + ": " + what);
}

const json& field(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) fail(path + "." + key, "missing required key");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected number");
  return v.get<double>();
}

void expect_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected object");
}

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path + "." + it.key(), "unknown key");
  }
}

DiffusePart parse_diffuse(const json& d, const std::string& path) {
  expect_object(d, path);
  reject_unknown(d, path, {"kind", "mass", "params"});
  const json& kind_v = field(d, path, "kind");
  if (!kind_v.is_string()) fail(path + ".kind", "expected string");
  const auto kind = diffuse_kind_from_string(kind_v.get<std::string>());
  if (!kind) fail(path + ".kind", "unknown diffuse kind '" + kind_v.get<std::string>() + "'");

  const std::string ppath = path + ".params";
  const json params = d.contains("params") ? d.at("params") : json::object();
  expect_object(params, ppath);

  if (*kind == DiffuseKind::empty) {
    if (d.contains("mass") && number(d.at("mass"), path + ".mass") != 0.0) {
      fail(path + ".mass", "an empty diffuse part has mass 0");
    }
    reject_unknown(params, ppath, {});
    return {};
  }
  const double mass = number(field(d, path, "mass"), path + ".mass");
  switch (*kind) {
    case DiffuseKind::uniform:
    case DiffuseKind::arcsine: {
      reject_unknown(params, ppath, {"lo", "hi"});
      const double lo = number(field(params, ppath, "lo"), ppath + ".lo");
      const double hi = number(field(params, ppath, "hi"), ppath + ".hi");
      return *kind == DiffuseKind::uniform ? DiffusePart::uniform(lo, hi, mass) : DiffusePart::arcsine(lo, hi, mass);
    }
    case DiffuseKind::semicircle: {
      reject_unknown(params, ppath, {"center", "radius"});
      const double c = number(field(params, ppath, "center"), ppath + ".center");
      const double r = number(field(params, ppath, "radius"), ppath + ".radius");
      if (!(r > 0.0)) fail(ppath + ".radius", "must be positive");
      return DiffusePart::semicircle(c, r, mass);
    }
    case DiffuseKind::piecewise_linear_cdf: {
      reject_unknown(params, ppath, {"knots"});
      const std::string kpath = ppath + ".knots";
      const json& knots = field(params, ppath, "knots");
      if (!knots.is_array()) fail(kpath, "expected array of [x, cumulative] pairs");
      std::vector<CdfKnot> out;
      for (std::size_t i = 0; i < knots.size(); ++i) {
        const std::string ip = kpath + "[" + std::to_string(i) + "]";
        if (!knots[i].is_array() || knots[i].size() != 2) fail(ip, "expected [x, cumulative]");
        out.push_back({number(knots[i][0], ip + "[0]"), number(knots[i][1], ip + "[1]")});
      }
      if (!out.empty() && out.back().cumulative != mass) {
        fail(path + ".mass", "must equal the last knot's cumulative mass");
      }
      return DiffusePart::piecewise_linear(std::move(out));
    }
    case DiffuseKind::empty:
      break;
  }
  return {};
}

}  // namespace

SpectralMeasure measure_from_json(const json& doc) {
  const std::string root = "$";
  expect_object(doc, root);
  reject_unknown(doc, root, {"support", "atoms", "diffuse", "atom_family"});

  const json& sup = field(doc, root, "support");
  if (!sup.is_array() || sup.size() != 2) fail("$.support", "expected [a, b]");
  const Interval support{number(sup[0], "$.support[0]"), number(sup[1], "$.support[1]")};

  std::vector<Atom> atoms;
  if (doc.contains("atoms")) {
    const json& arr = doc.at("atoms");
    if (!arr.is_array()) fail("$.atoms", "expected array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "$.atoms[" + std::to_string(i) + "]";
      expect_object(arr[i], p);
      reject_unknown(arr[i], p, {"location", "weight"});
      atoms.push_back({number(field(arr[i], p, "location"), p + ".location"),
                       number(field(arr[i], p, "weight"), p + ".weight")});
    }
  }

  DiffusePart diffuse;
  if (doc.contains("diffuse")) diffuse = parse_diffuse(doc.at("diffuse"), "$.diffuse");

  std::optional<AtomFamily> family;
  if (doc.contains("atom_family")) {
    const json& f = doc.at("atom_family");
    expect_object(f, "$.atom_family");
    reject_unknown(f, "$.atom_family", {"name", "tol"});
    const json& name = field(f, "$.atom_family", "name");
    if (!name.is_string()) fail("$.atom_family.name", "expected string");
    AtomFamily fam{name.get<std::string>()};
    if (!is_known_family(fam.name)) fail("$.atom_family.name", "unknown family '" + fam.name + "'");
    if (f.contains("tol")) fam.tol = number(f.at("tol"), "$.atom_family.tol");
    if (!(fam.tol > 0.0)) fail("$.atom_family.tol", "must be positive");
    family = fam;
  }
  return SpectralMeasure(support, std::move(atoms), std::move(diffuse), family);
}

json measure_to_json(const SpectralMeasure& m) {
  json doc;
  doc["support"] = {m.support().lo, m.support().hi};
  json atoms = json::array();
  for (const auto& a : m.atoms()) atoms.push_back({{"location", a.location}, {"weight", a.weight}});
  doc["atoms"] = atoms;

  const DiffusePart& d = m.diffuse();
  json diffuse{{"kind", to_string(d.kind())}, {"mass", d.mass()}};
  switch (d.kind()) {
    case DiffuseKind::empty:
      diffuse["params"] = json::object();
      break;
    case DiffuseKind::uniform:
    case DiffuseKind::arcsine:
      diffuse["params"] = {{"lo", d.lo()}, {"hi", d.hi()}};
      break;
    case DiffuseKind::semicircle:
      diffuse["params"] = {{"center", d.center()}, {"radius", d.radius()}};
      break;
    case DiffuseKind::piecewise_linear_cdf: {
      json knots = json::array();
      for (const auto& k : d.knots()) knots.push_back({k.x, k.cumulative});
      diffuse["params"] = {{"knots", knots}};
      break;
    }
  }
  doc["diffuse"] = diffuse;
  if (const auto& f = m.atom_family()) doc["atom_family"] = {{"name", f->name}, {"tol", f->tol}};
  return doc;
}

SpectralMeasure parse_measure(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidMeasure(std::string("$: malformed JSON: ") + e.what());
  }
  return measure_from_json(doc);
}

SpectralMeasure load_measure(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidMeasure("$: cannot open measure file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_measure(buf.str());
}

}  // namespace freehaus
