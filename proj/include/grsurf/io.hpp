#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "grsurf/frame.hpp"
#include "grsurf/geometry.hpp"
#include "grsurf/immersion.hpp"
#include "grsurf/solutions.hpp"

namespace grsurf {

using nlohmann::json;

// Complex matrices are serialized as flat row-major arrays of [re, im] pairs;
// the dimensions live next to them in the enclosing object.

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j, int rows, int cols);

json grid_to_json(const LightConeGrid& g);
LightConeGrid grid_from_json(const json& j);

/// Grid field <-> JSON ("grsurf.gridfield" format). Exact jets are not
/// serialized; a re-loaded analytic field is differentiated numerically.
json gridfield_to_json(const GridField& field);
GridField gridfield_from_json(const json& j);

/// Surface mesh <-> JSON ("grsurf.surface" format): per node the su(N) matrix
/// and the coordinate vector in the documented basis ordering.
json surface_to_json(const SurfaceMesh& mesh);
SurfaceMesh surface_from_json(const json& j);

/// Per-node scalar geometry as CSV:
/// xiL,xiR,J_L,J_R,G_LR,detG,K,absH,regular (K/absH empty when not computed).
std::string geometry_csv(const GeometryField& geo);

/// Surface coordinates as CSV: xiL,xiR,c0,...,c_{d-1}.
std::string surface_csv(const SurfaceMesh& mesh);

/// Three-column projection of the node cloud for plotting: either the given
/// basis-coordinate axes or the top-3 principal components of the cloud.
/// The chosen mode is recorded in the leading comment line.
std::string projection_csv(const SurfaceMesh& mesh, bool use_pca,
                           const std::vector<int>& axes = {0, 1, 2});

/// Frame bundle field with connection data ("grsurf.frame" format).
json frame_to_json(const FrameField& frames, const GaussWeingartenField& gw,
                   const GcrField& gcr);

/// Formats a double with 17 significant digits (round-trip safe).
std::string format_double(double v);

struct WrittenFile {
    std::string path; // relative to the output directory
    std::size_t bytes = 0;
    std::string sha256;
};

/// Writes content under dir/name (creating dir), returning the manifest entry.
WrittenFile write_artifact(const std::string& dir, const std::string& name,
                           const std::string& content);

/// Manifest JSON listing every produced file with content digests.
json manifest_json(const std::vector<WrittenFile>& files, const json& config);

} // namespace grsurf
