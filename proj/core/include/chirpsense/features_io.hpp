#pragma once

#include <string>
#include <vector>

#include "chirpsense/dsp.hpp"
#include "chirpsense/ml.hpp"

namespace chirpsense {

// Feature CSV: frame_index,time_s,bin_index,amplitude,phase,d_amplitude,d_phase.
void write_features_csv(const std::string& path, const std::vector<FrameFeatures>& rows,
                        std::size_t bin_index);
std::vector<FrameFeatures> read_features_csv(const std::string& path,
                                             std::size_t* bin_index = nullptr);

// Labeled variant appends label (and optionally session) columns; this is the
// training input format.
void write_labeled_csv(const std::string& path, const std::vector<FrameFeatures>& rows,
                       std::size_t bin_index, const std::vector<int>& labels,
                       const std::string& session = {});

// Accepts any CSV carrying amplitude, phase and label columns (session
// optional); extra columns are ignored.
ml::Dataset read_labeled_dataset(const std::string& path);

// Prediction CSV: frame_index,time_s,label.
void write_predictions_csv(const std::string& path,
                           const std::vector<FrameFeatures>& rows,
                           const std::vector<int>& labels);
std::vector<int> read_predictions_csv(const std::string& path);

}  // namespace chirpsense
