#pragma once

#include <string>
#include <vector>

#include "crmimo/channel.hpp"
#include "crmimo/source.hpp"

namespace crmimo {

/// "%.17g" formatting; round-trips doubles exactly and is locale-independent.
std::string fmt_num(double v);

/// Empirical ensemble CSV: header line "n_rx=R,n_tx=T", then one row per state
/// of interleaved re,im values in row-major order.
FadingEnsemble load_ensemble_csv(const std::string& path);
void save_ensemble_csv(const std::string& path, const std::vector<ChannelState>& states);

/// Joint source CSV: header row of Y labels, one row per X symbol with its label.
JointSource load_source_csv(const std::string& path);
void save_source_csv(const std::string& path, const JointSource& source);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace crmimo
