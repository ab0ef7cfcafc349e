#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace stvf {

// Pre-rendered table cell. Numbers are fixed to 17 significant digits at
// construction so CSV and JSON emission share one textual source.
struct Cell {
    enum class Kind { Number, Text, Null };
    std::string text;
    Kind kind = Kind::Null;

    static Cell number(double v);
    static Cell integer(long long v);
    static Cell boolean(bool v);
    static Cell str(std::string s);
    static Cell null();
};

struct Assertion {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct ExperimentConfig {
    std::string experiment;
    double T = 1.0;
    int modes = 32;
    int nt = 256;
    std::vector<double> domain_lengths = {1.0};
    std::uint64_t seed = 0;
    int samples = 1000;
    std::string out;            // empty: print the table to stdout
    std::string format = "csv"; // csv or json

    // explicit-set markers: experiment defaults only fill untouched fields
    bool T_set = false;
    bool modes_set = false;
    bool nt_set = false;
    bool domain_set = false;
    bool seed_set = false;
    bool samples_set = false;
    bool out_set = false;
    bool format_set = false;
};

struct ExperimentResult {
    std::string experiment;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<Assertion> summary;
    ExperimentConfig config; // resolved config echo for provenance
    // scalar tracked across convergence-study levels (error against the
    // closed form where one exists, otherwise the observed constant)
    double study_metric = std::numeric_limits<double>::quiet_NaN();

    bool passed() const;
};

struct StudyRefinement {
    int nt_doublings = 0;
    int mode_doublings = 0;
};

struct ExperimentInfo {
    std::string name;
    std::string description;
};

const std::vector<ExperimentInfo>& experiment_registry();
bool is_known_experiment(const std::string& name);

// Applies per-experiment defaults to fields without explicit-set markers and
// validates ranges. Unknown experiment or invalid field -> invalid_argument.
ExperimentConfig resolve_config(ExperimentConfig config);

ExperimentResult run_experiment(const ExperimentConfig& config);

// Reruns the experiment over the refinement ladder; level l uses
// nt * 2^min(l, nt_doublings) and modes * 2^min(l, mode_doublings).
ExperimentResult convergence_study(const ExperimentConfig& config,
                                   const StudyRefinement& refine);

std::string render_csv(const ExperimentResult& result);
std::string render_json(const ExperimentResult& result);

// Writes the rendered result; failure -> runtime_error naming the path.
void emit(const ExperimentResult& result, const std::string& path,
          const std::string& format);

// Flat JSON object mirroring ExperimentConfig; unknown keys or wrong types
// -> invalid_argument. Fields present in the file get their set markers.
ExperimentConfig load_config_file(const std::string& path);

// Copies fields marked set in `file` into `target` unless the target field
// already carries a flag-level marker (flags win over the config file).
void apply_config_file(ExperimentConfig& target, const ExperimentConfig& file);

} // namespace stvf
