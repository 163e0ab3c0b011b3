#pragma once

#include <filesystem>

#include "opr/eval/latent.hpp"

namespace opr::eval {

// Scatter of the first two principal axes (the raw axes when d == 2),
// one colour per anchor kind, with a legend. PNG.
void write_scatter_png(const EmbeddingDump& dump, const std::filesystem::path& path, int size = 512);

// Per-anchor 2-D occupancy heatmaps side by side on shared axes. PNG.
void write_density_png(const EmbeddingDump& dump, const std::filesystem::path& path, int cell = 160, int bins = 32);

// The planar coordinates the plots use, as CSV: item_id,anchor,x,y.
void write_plot_csv(const EmbeddingDump& dump, const std::filesystem::path& path);

}  // namespace opr::eval
