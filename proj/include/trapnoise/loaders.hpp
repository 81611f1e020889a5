#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trapnoise/config.hpp"
#include "trapnoise/inference.hpp"
#include "trapnoise/layered_media.hpp"
#include "trapnoise/materials.hpp"
#include "trapnoise/noise_models.hpp"
#include "trapnoise/patch_field.hpp"

namespace trapnoise {

struct MaterialLibrary {
  std::filesystem::path source;
  std::map<std::string, ResistivityTable> tables;
  std::map<std::string, MaterialModel> materials;

  const MaterialModel& get(const std::string& name) const;
};

MaterialLibrary load_materials(const ConfigFile& cfg);
MaterialLibrary load_materials(const std::filesystem::path& path);

// Library named by the top-level `materials = path` key, unless `override`
// is given.
MaterialLibrary materials_for(const ConfigFile& cfg, const std::filesystem::path* override);

LayerStack load_stack(const ConfigFile& cfg, const MaterialLibrary& lib);
LayerStack load_stack(const std::filesystem::path& path,
                      const std::filesystem::path* materials_override = nullptr);

// Copy of the stack with lambda0 replaced in every two-fluid layer.
LayerStack with_london_depth(const LayerStack& stack, double lambda0);

std::vector<ElectrodeModel> load_circuit(const ConfigFile& cfg, const MaterialLibrary& lib);
std::vector<ElectrodeModel> load_circuit(const std::filesystem::path& path,
                                         const std::filesystem::path* materials_override = nullptr);

PatchScene load_scene(const ConfigFile& cfg);
PatchScene load_scene(const std::filesystem::path& path);

struct ModelParams {
  std::optional<TempFitParams> temp;
  std::optional<std::array<double, 3>> power_law;  // S_E0, beta, T0
  std::optional<std::array<double, 3>> arrhenius;  // S_E0, S_ET, T0
  double surface_alpha = -1.0;
  std::vector<double> temperatures;
  std::vector<double> frequencies;  // Hz
};

ModelParams load_params(const ConfigFile& cfg);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace trapnoise
