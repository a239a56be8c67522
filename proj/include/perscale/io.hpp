#pragma once

// CSV and JSON interchange formats. Numbers are written with 12 significant
// digits.

#include <string>
#include <vector>

#include "perscale/measures.hpp"
#include "perscale/persistence.hpp"
#include "perscale/sampling.hpp"
#include "perscale/scaling.hpp"

namespace perscale {

std::string format_number(double v);

/// `sample_id,t,x0,x1[,x2]` plus a sidecar `<path>.json` recording the
/// dimension and the window of every cloud.
void write_points_csv(const std::string& path, const std::vector<PointCloud>& clouds);
/// Clouds in file order of first appearance of (sample_id, t). Throws
/// ValidationError naming the `sample` stage when the file is missing or
/// malformed.
std::vector<PointCloud> read_points_csv(const std::string& path);

/// `sample_id,t,dim,birth,death` plus a sidecar `<path>.json` with essential
/// classes and provenance.
void write_diagrams_csv(const std::string& path, const std::vector<PersistenceDiagram>& diagrams);
std::vector<PersistenceDiagram> read_diagrams_csv(const std::string& path);

/// `t,b_lo,b_hi,d_lo,d_hi,mean,stderr,normalization`, active bins only.
void write_measure_csv(const std::string& path, const std::vector<MeasureHistogram>& hists);

/// `t,s,value`.
void write_summary_csv(const std::string& path, const std::vector<double>& times,
                       const std::vector<double>& grid, const std::vector<std::vector<double>>& values);

/// `t,k,volume,n_classes,l_1,l_2,l_ndelta,d_max,pers_total,e_alpha`. Absent
/// values are written as empty fields.
void write_quantities_csv(const std::string& path, const std::vector<GeometricQuantities>& rows, double n_plus_delta);
std::vector<GeometricQuantities> read_quantities_csv(const std::string& path, double n_plus_delta);

/// Whole file as a string; throws ValidationError naming `producer` if absent.
std::string read_file(const std::string& path, const std::string& producer);

}  // namespace perscale
