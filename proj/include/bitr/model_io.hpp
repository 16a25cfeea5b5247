#pragma once

#include <filesystem>
#include <string>

#include "bitr/itr.hpp"

namespace bitr {

inline constexpr int kModelFormatVersion = 1;

/// A fitted decision rule as persisted on disk.
struct SavedModel {
  JointModel model;
  PolicyNetwork net;
  WeightConfig c;
  double t1 = 1.0;
  double t2 = 1.0;
};

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON text with an explicit "version" field. Doubles are written in
/// shortest round-trip form, so reading back reproduces every bit.
std::string model_to_json(const SavedModel& m);
SavedModel model_from_json(const std::string& text);

void save_model(const SavedModel& m, const std::filesystem::path& path);
SavedModel load_model(const std::filesystem::path& path);

}  // namespace bitr
