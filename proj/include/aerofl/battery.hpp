// Copyright 2026 The aerofl Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <iosfwd>
#include <string>

#include "aerofl/config.hpp"
#include "aerofl/protocol.hpp"

namespace aerofl {

// Builds the full per-seed environment: spatial fields, temporal mappings,
// optimized trajectories and the pre-sensed train/test datasets. Every draw
// comes from a purpose-labeled substream of run_seed.
Environment build_environment(const ExperimentConfig& config,
                              std::uint64_t run_seed, int threads = 1);

ProtocolConfig protocol_config(const ExperimentConfig& config);

// Derived seed for replication k of a battery.
std::uint64_t replicate_seed(std::uint64_t master_seed, int k);

// Runs every (seed, variant) pair of the battery and writes the artifact
// tree (CSV tables, SVG plots, manifest) under out_dir. Returns 0 on
// success. With dry_run the resolved plan is printed and nothing written.
int run_battery(const ExperimentConfig& config, const std::string& out_dir,
                int threads, bool dry_run, std::ostream& log);

// Regenerates the SVG plots from the CSV tables in a battery output
// directory (the `plot` subcommand).
void regenerate_plots(const std::string& dir);

}  // namespace aerofl
