#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polybound/milp_model.hpp"

namespace polybound {

enum class ExportFormat { MpsFixed, NativeJson };

struct ExportResult {
  std::string content;
  /// Original-name -> emitted-name pairs for every variable that had to be
  /// renamed to fit the 8-character MPS field (empty for native-json).
  std::vector<std::pair<std::string, std::string>> renamed;
};

/// Serialize the model.  MPS is the classical fixed column layout (fields at
/// columns 2, 5, 15, 25, 40, 50) with binaries inside an INTEGER marker
/// block; native-json is a lossless dump.
ExportResult export_milp(const MilpModel& model, ExportFormat format);

/// Inverse of export_milp(NativeJson); bit-exact round trip.
MilpModel import_native_json(const std::string& text);

}  // namespace polybound
