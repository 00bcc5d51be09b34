#pragma once

#include "stroma/config.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace stroma {

std::string_view version();

/// Writes `path` through a sibling "<name>.partial" file that is renamed on commit().
/// If the writer is destroyed without commit() the .partial file is kept for inspection.
class PartialFile {
 public:
  explicit PartialFile(std::filesystem::path path);
  PartialFile(const PartialFile&) = delete;
  PartialFile& operator=(const PartialFile&) = delete;

  std::ofstream& stream() { return out_; }
  void commit();
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::filesystem::path partial_;
  std::ofstream out_;
  bool committed_ = false;
};

/// Streams curve.csv rows (step, iop_mmHg, apex_disp_mm, residual) as steps converge.
class CurveWriter {
 public:
  explicit CurveWriter(const std::filesystem::path& path);
  void add(const StepRecord& rec);
  void commit() { file_.commit(); }

 private:
  PartialFile file_;
};

void write_curve_csv(const std::filesystem::path& path, const std::vector<StepRecord>& steps);
void write_profile_csv(const std::filesystem::path& path, const Profile& profile);
void write_unit_cell_csv(const std::filesystem::path& path, const std::vector<UnitCellPoint>& points);
void write_history_log(const std::filesystem::path& path, const std::vector<HistoryRecord>& history);

/// Legacy ASCII VTK unstructured grid of the hexahedra in the given configuration.
/// Point data: displacement (when given). Cell data: layer and damage (when given).
void write_hex_vtk(const std::filesystem::path& path, const Mesh& mesh, const Eigen::Matrix3Xd& positions,
                   const Eigen::Matrix3Xd* displacement = nullptr, const std::vector<double>* damage = nullptr);

/// Legacy ASCII VTK polylines of the trusswork. Cell data: kind code, area, damage (when given).
void write_truss_vtk(const std::filesystem::path& path, const Eigen::Matrix3Xd& positions,
                     const std::vector<Truss>& trusses, const std::vector<double>* damage = nullptr);

struct RunManifest {
  nlohmann::json config;  ///< resolved config echo
  std::string command;
  std::string status = "ok";  ///< "ok" or "failed"
  std::string error;
  double wall_clock_s = 0.0;
  std::vector<StepRecord> steps;
  std::vector<std::string> notes;  ///< scenario summary lines
};

/// manifest.txt: plain text ending with the resolved config as JSON after a
/// "config:" line, so parse_config accepts the manifest itself.
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace stroma
