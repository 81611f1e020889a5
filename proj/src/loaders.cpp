#include "trapnoise/loaders.hpp"

#include <cmath>

#include "trapnoise/errors.hpp"

namespace trapnoise {

namespace {

// Library errors re-raised with the location of the offending section.
template <class F>
auto located(const ConfigSection& s, F&& f) {
  try {
    return f();
  } catch (const DomainError& e) {
    s.fail(e.what());
  }
}

double positive(const ConfigSection& s, const std::string& key) {
  const double v = s.get_double(key);
  if (!(v > 0.0) || !std::isfinite(v)) s.fail_at(*s.find(key), "'" + key + "' must be > 0");
  return v;
}

ResistivityTable table_from_rows(const ConfigSection& s, const std::string& label) {
  const double scale = s.get_double("scale", 1.0);
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : s.rows) {
    if (r.values.size() != 2) s.fail("table rows need exactly two numbers (T, rho)", r.line, 1);
    pts.emplace_back(r.values[0], r.values[1] * scale);
  }
  if (pts.empty()) s.fail("table has no rows");
  return located(s, [&] { return ResistivityTable::from_points(label, std::move(pts)); });
}

const ResistivityTable& table_ref(const ConfigSection& s, const std::string& key,
                                  const std::map<std::string, ResistivityTable>& tables) {
  const auto* e = s.find(key);
  if (!e) s.fail("missing key '" + key + "'");
  const auto it = tables.find(e->value);
  if (it == tables.end()) s.fail_at(*e, "unknown table '" + e->value + "'");
  return it->second;
}

const MaterialModel& material_ref(const ConfigSection& s, const ConfigEntry& e, const std::string& name,
                                  const MaterialLibrary& lib) {
  const auto it = lib.materials.find(name);
  if (it == lib.materials.end()) s.fail_at(e, "unknown material '" + name + "'");
  return it->second;
}

Conductor conductor_ref(const ConfigSection& s, const std::string& key, const MaterialLibrary& lib) {
  const auto* e = s.find(key);
  if (!e) s.fail("missing key '" + key + "'");
  const auto& m = material_ref(s, *e, e->value, lib);
  const auto* c = std::get_if<Conductor>(&m);
  if (!c) s.fail_at(*e, "material '" + e->value + "' is not a normal conductor");
  return *c;
}

std::vector<double> fixed_list(const ConfigSection& s, const std::string& key, std::size_t n) {
  auto v = s.get_doubles(key);
  if (v.size() != n)
    s.fail_at(*s.find(key), "'" + key + "' needs " + std::to_string(n) + " numbers");
  return v;
}

Rect rect_of(const ConfigSection& s, const ConfigEntry& e) {
  std::size_t off = 0;
  std::vector<double> v;
  try {
    v = parse_double_list(e.value, &off);
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(s.label() + ": " + ex.what(), s.file, e.line, e.column + off);
  }
  if (v.size() != 4) s.fail_at(e, "'" + e.key + "' needs four numbers: x_min x_max y_min y_max");
  return Rect{v[0], v[1], v[2], v[3]};
}

}  // namespace

// ------------------------------------------------------------ materials

const MaterialModel& MaterialLibrary::get(const std::string& name) const {
  const auto it = materials.find(name);
  if (it == materials.end()) throw ConfigError("unknown material '" + name + "'", source.string());
  return it->second;
}

MaterialLibrary load_materials(const ConfigFile& cfg) {
  MaterialLibrary lib;
  lib.source = cfg.path;
  cfg.top.check_keys({});
  for (const auto* s : cfg.of_kind("table")) {
    s->check_keys({"label", "scale"}, true);
    if (s->name.empty()) s->fail("table needs a name");
    if (lib.tables.count(s->name)) s->fail("duplicate table '" + s->name + "'");
    lib.tables.emplace(s->name, table_from_rows(*s, s->get_string("label", s->name)));
  }
  for (const auto& s : cfg.sections) {
    if (s.kind == "table") continue;
    if (s.kind != "material") s.fail("unknown section kind '" + s.kind + "'");
    if (s.name.empty()) s.fail("material needs a name");
    if (lib.materials.count(s.name)) s.fail("duplicate material '" + s.name + "'");
    const std::string model = s.get_string("model");
    MaterialModel m;
    if (model == "vacuum") {
      s.check_keys({"model"});
      m = Vacuum{};
    } else if (model == "conductor") {
      if (s.has("table")) {
        s.check_keys({"model", "table"});
        m = Conductor{table_ref(s, "table", lib.tables)};
      } else {
        s.check_keys({"model", "scale"}, true);
        m = Conductor{table_from_rows(s, s.name)};
      }
    } else if (model == "two_fluid") {
      s.check_keys({"model", "lambda0", "tc", "tc_uncertainty", "sigma_n", "normal_table",
                    "normal_t_max", "sc_sheet_r", "sc_sheet_f_ref", "sc_sheet_exponent"});
      TwoFluidSC sc;
      sc.lambda0 = positive(s, "lambda0");
      sc.tc = positive(s, "tc");
      sc.tc_uncertainty = s.get_double("tc_uncertainty", sc.tc_uncertainty);
      sc.sigma_n = positive(s, "sigma_n");
      if (s.has("normal_table"))
        sc.rho_normal = table_ref(s, "normal_table", lib.tables);
      else
        sc.rho_normal = located(s, [&] {
          return linear_normal_state_table(sc.sigma_n, sc.tc, s.get_double("normal_t_max", 300.0));
        });
      sc.sc_sheet.r_ref = s.get_double("sc_sheet_r", sc.sc_sheet.r_ref);
      sc.sc_sheet.f_ref_hz = s.get_double("sc_sheet_f_ref", sc.sc_sheet.f_ref_hz);
      sc.sc_sheet.exponent = s.get_double("sc_sheet_exponent", sc.sc_sheet.exponent);
      m = sc;
    } else if (model == "dielectric") {
      s.check_keys({"model", "eps_r", "tan_delta"});
      m = LossyDielectric{s.get_double("eps_r"), s.get_double("tan_delta", 0.0)};
    } else {
      s.fail_at(*s.find("model"), "unknown model '" + model +
                                      "' (expected vacuum, conductor, two_fluid or dielectric)");
    }
    located(s, [&] {
      validate(m);
      return 0;
    });
    lib.materials.emplace(s.name, std::move(m));
  }
  return lib;
}

MaterialLibrary load_materials(const std::filesystem::path& path) { return load_materials(load_config(path)); }

MaterialLibrary materials_for(const ConfigFile& cfg, const std::filesystem::path* override) {
  if (override) return load_materials(*override);
  const auto* e = cfg.top.find("materials");
  if (!e) cfg.top.fail("missing top-level 'materials = <path>'", 1, 1);
  const auto p = cfg.resolve(e->value);
  if (!std::filesystem::exists(p)) cfg.top.fail_at(*e, "materials file not found: " + p.string());
  return load_materials(p);
}

// ---------------------------------------------------------------- stack

LayerStack load_stack(const ConfigFile& cfg, const MaterialLibrary& lib) {
  cfg.top.check_keys({"materials"});
  LayerStack stack;
  for (const auto& s : cfg.sections) {
    if (s.kind != "layer") s.fail("unknown section kind '" + s.kind + "' (expected layer)");
    s.check_keys({"material", "thickness"});
    Layer l;
    l.name = s.name.empty() ? s.get_string("material") : s.name;
    const auto* e = s.find("material");
    if (!e) s.fail("missing key 'material'");
    l.material = material_ref(s, *e, e->value, lib);
    if (s.has("thickness")) l.thickness = positive(s, "thickness");
    stack.layers.push_back(std::move(l));
  }
  if (stack.layers.empty()) throw ConfigError("stack has no layers", cfg.path.string());
  try {
    stack.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), cfg.path.string());
  }
  return stack;
}

LayerStack load_stack(const std::filesystem::path& path, const std::filesystem::path* materials_override) {
  const ConfigFile cfg = load_config(path);
  return load_stack(cfg, materials_for(cfg, materials_override));
}

LayerStack with_london_depth(const LayerStack& stack, double lambda0) {
  if (!(lambda0 > 0.0)) throw DomainError("lambda0 must be > 0");
  LayerStack out = stack;
  for (auto& l : out.layers)
    if (auto* sc = std::get_if<TwoFluidSC>(&l.material)) sc->lambda0 = lambda0;
  return out;
}

// -------------------------------------------------------------- circuit

std::vector<ElectrodeModel> load_circuit(const ConfigFile& cfg, const MaterialLibrary& lib) {
  cfg.top.check_keys({"materials"});
  std::map<std::string, FilterNetwork> filters;
  std::map<std::string, PcbTrace> traces;
  std::map<std::string, WireBond> bonds;
  for (const auto& s : cfg.sections) {
    if (s.kind == "electrode") continue;
    if (s.name.empty()) s.fail("section needs a name");
    if (s.kind == "filter") {
      s.check_keys({"series_r", "capacitor"});
      FilterNetwork f;
      f.series_r = positive(s, "series_r");
      for (const auto* e : s.all("capacitor")) {
        std::size_t off = 0;
        std::vector<double> v;
        try {
          v = parse_double_list(e->value, &off);
        } catch (const std::invalid_argument& ex) {
          throw ConfigError(s.label() + ": " + ex.what(), s.file, e->line, e->column + off);
        }
        if (v.size() != 2) s.fail_at(*e, "'capacitor' needs two numbers: C (F) and ESR (Ohm)");
        f.capacitors.push_back({v[0], v[1]});
      }
      located(s, [&] {
        f.validate();
        return 0;
      });
      filters[s.name] = f;
    } else if (s.kind == "trace") {
      s.check_keys({"width", "thickness", "length", "material"});
      traces[s.name] = PcbTrace{positive(s, "width"), positive(s, "thickness"), positive(s, "length"),
                                conductor_ref(s, "material", lib)};
    } else if (s.kind == "bond") {
      s.check_keys({"diameter", "length", "material"});
      bonds[s.name] = WireBond{positive(s, "diameter"), positive(s, "length"), conductor_ref(s, "material", lib), 1};
    } else {
      s.fail("unknown section kind '" + s.kind + "' (expected filter, trace, bond or electrode)");
    }
  }

  std::vector<ElectrodeModel> out;
  for (const auto* s : cfg.of_kind("electrode")) {
    s->check_keys({"distance", "squares", "length", "width", "film", "trace", "bond", "bonds",
                   "contact_r", "filter", "approximate"});
    if (s->name.empty()) s->fail("electrode needs a name");
    ElectrodeModel e;
    e.name = s->name;
    e.characteristic_distance = positive(*s, "distance");
    if (s->has("squares")) {
      if (s->has("length") || s->has("width")) s->fail("give either 'squares' or 'length' and 'width'");
      e.strip_length = positive(*s, "squares");
      e.strip_width = 1.0;
    } else if (s->has("length") || s->has("width")) {
      e.strip_length = positive(*s, "length");
      e.strip_width = positive(*s, "width");
    }
    for (const auto* f : s->all("film")) {
      const auto sp = f->value.find_first_of(" \t");
      if (sp == std::string::npos) s->fail_at(*f, "'film' needs a material name and a thickness (m)");
      const std::string name = f->value.substr(0, sp);
      const auto t = parse_double(f->value.substr(sp));
      if (!t || !(*t > 0.0)) s->fail_at(*f, "film thickness must be a number > 0");
      e.films.push_back({material_ref(*s, *f, name, lib), *t});
    }
    auto lookup = [&](const char* key, auto& map) -> decltype(&map.begin()->second) {
      const auto* k = s->find(key);
      if (!k) return nullptr;
      const auto it = map.find(k->value);
      if (it == map.end()) s->fail_at(*k, std::string("unknown ") + key + " '" + k->value + "'");
      return &it->second;
    };
    if (const auto* t = lookup("trace", traces)) e.lead.pcb_trace = *t;
    if (const auto* b = lookup("bond", bonds)) {
      e.lead.wire_bond = *b;
      e.lead.wire_bond->multiplicity = static_cast<int>(s->get_int("bonds", 1));
    } else if (s->has("bonds")) {
      s->fail_at(*s->find("bonds"), "'bonds' requires a 'bond' entry");
    }
    e.lead.contact_r_per_bond = s->get_double("contact_r", 0.0);
    if (const auto* f = lookup("filter", filters)) e.filter = *f;
    e.approximate = s->get_bool("approximate", false);
    located(*s, [&] {
      e.validate();
      return 0;
    });
    out.push_back(std::move(e));
  }
  if (out.empty()) throw ConfigError("circuit has no electrodes", cfg.path.string());
  return out;
}

std::vector<ElectrodeModel> load_circuit(const std::filesystem::path& path,
                                         const std::filesystem::path* materials_override) {
  const ConfigFile cfg = load_config(path);
  return load_circuit(cfg, materials_for(cfg, materials_override));
}

// ---------------------------------------------------------------- scene

PatchScene load_scene(const ConfigFile& cfg) {
  cfg.top.check_keys({});
  PatchScene scene;
  bool have_ion = false;
  for (const auto& s : cfg.sections) {
    if (s.kind == "ion") {
      if (have_ion) s.fail("duplicate [ion] section");
      have_ion = true;
      s.check_keys({"x", "y", "height", "axial"});
      scene.ion.x = s.get_double("x", 0.0);
      scene.ion.y = s.get_double("y", 0.0);
      scene.ion.height = positive(s, "height");
      if (s.has("axial")) {
        const auto a = fixed_list(s, "axial", 2);
        const double n = std::hypot(a[0], a[1]);
        if (!(n > 0.0)) s.fail_at(*s.find("axial"), "axial direction must be non-zero");
        scene.ion.axial_x = a[0] / n;
        scene.ion.axial_y = a[1] / n;
      }
    } else if (s.kind == "scene") {
      s.check_keys({"target_group"});
      scene.target_group = s.get_string("target_group", scene.target_group);
    } else if (s.kind == "region") {
      s.check_keys({"group", "rect", "hole", "weight"});
      PlaneRegion r;
      r.name = s.name;
      r.group = s.get_string("group", s.name);
      const auto* re = s.find("rect");
      if (!re) s.fail("missing key 'rect'");
      r.rect = rect_of(s, *re);
      for (const auto* h : s.all("hole")) r.holes.push_back(rect_of(s, *h));
      r.weight = s.get_double("weight", 1.0);
      scene.regions.push_back(std::move(r));
    } else {
      s.fail("unknown section kind '" + s.kind + "' (expected ion, scene or region)");
    }
  }
  if (!have_ion) throw ConfigError("scene has no [ion] section", cfg.path.string());
  try {
    scene.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what(), cfg.path.string());
  }
  return scene;
}

PatchScene load_scene(const std::filesystem::path& path) { return load_scene(load_config(path)); }

// --------------------------------------------------------------- params

ModelParams load_params(const ConfigFile& cfg) {
  cfg.top.check_keys({});
  ModelParams mp;
  for (const auto& s : cfg.sections) {
    if (s.kind == "temperature_model") {
      s.check_keys({"model", "T1", "beta1", "T2", "beta2", "T_star", "gamma0"});
      TempFitParams p;
      const std::string model = s.get_string("model", "piecewise");
      if (model != "simple" && model != "piecewise")
        s.fail_at(*s.find("model"), "model must be simple or piecewise");
      p.piecewise = model == "piecewise";
      p.T1 = positive(s, "T1");
      p.beta1 = positive(s, "beta1");
      if (p.piecewise) {
        p.T2 = positive(s, "T2");
        p.beta2 = positive(s, "beta2");
        p.T_star = positive(s, "T_star");
      }
      for (const auto* e : s.all("gamma0")) {
        std::vector<double> v;
        try {
          v = parse_double_list(e->value);
        } catch (const std::invalid_argument& ex) {
          s.fail_at(*e, ex.what());
        }
        if (v.size() != 2 || !(v[0] > 0.0) || !(v[1] > 0.0))
          s.fail_at(*e, "'gamma0' needs a frequency (Hz) and a rate, both > 0");
        p.gamma0[v[0]] = v[1];
      }
      if (p.gamma0.empty()) s.fail("at least one 'gamma0' entry is required");
      mp.temp = p;
    } else if (s.kind == "surface_model") {
      if (s.name == "power_law") {
        s.check_keys({"S0", "beta", "T0", "alpha"});
        mp.power_law = std::array<double, 3>{positive(s, "S0"), s.get_double("beta"), positive(s, "T0")};
      } else if (s.name == "arrhenius") {
        s.check_keys({"S0", "S_ET", "T0", "alpha"});
        mp.arrhenius = std::array<double, 3>{positive(s, "S0"), positive(s, "S_ET"), positive(s, "T0")};
      } else {
        s.fail("surface_model must be power_law or arrhenius");
      }
      mp.surface_alpha = s.get_double("alpha", mp.surface_alpha);
    } else if (s.kind == "grid") {
      s.check_keys({"temperatures", "frequencies"});
      if (s.has("temperatures")) mp.temperatures = s.get_doubles("temperatures");
      if (s.has("frequencies")) mp.frequencies = s.get_doubles("frequencies");
    } else {
      s.fail("unknown section kind '" + s.kind + "' (expected temperature_model, surface_model or grid)");
    }
  }
  return mp;
}

ModelParams load_params(const std::filesystem::path& path) { return load_params(load_config(path)); }

}  // namespace trapnoise
