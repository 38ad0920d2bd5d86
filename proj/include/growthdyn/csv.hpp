#ifndef GROWTHDYN_CSV_HPP_
#define GROWTHDYN_CSV_HPP_

#include <string>
#include <vector>

#include "growthdyn/panel.hpp"

namespace growthdyn::csv {

// One parsed value row, before the emissions/GDP join.
struct ValueRecord {
    std::string region_id;
    int year = 0;
    double value = 0.0;
    std::string dev_class;
};

// Reads one input table. Long format is canonical:
//   region_id,year,<value_name>[,dev_class]
// A wide region x year matrix (header: region_id,<year>,<year>,...) is
// accepted for convenience. Values must be strictly positive.
std::vector<ValueRecord> read_value_table(const std::string& path,
                                          const std::string& value_name);

// Parses both files and joins them on (region_id, year). Region-years
// present in only one file raise JoinError.
std::vector<RegionYearObservation> ingest(const std::string& emissions_path,
                                          const std::string& gdp_path);

// Emits the ingest schema (long format, full double precision), so
// generated panels can round-trip through the batch pipeline.
void write_observations(const std::vector<RegionYearObservation>& observations,
                        const std::string& emissions_path,
                        const std::string& gdp_path);

// Writes content to path via a temporary file and rename, so partial
// output never lands under the final name.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

// Deterministic %.*g formatting used for machine-readable output.
std::string format_sig(double value, int significant_digits = 6);

// FNV-1a of a file's bytes, as a hex string, for the run manifest.
std::string file_hash(const std::string& path);

}  // namespace growthdyn::csv

#endif  // GROWTHDYN_CSV_HPP_
