#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace lossless::harness {

enum class CheckStatus { pass, fail, inconclusive };

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    std::string detail;
};

/// A numeric table. Column headers carry units, e.g. "sup_error [1]" or "t [s]".
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
};

/// Two-column curve, written as a plain .dat file.
struct Curve {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<double> x;
    std::vector<double> y;
};

struct NamedMatrix {
    std::string name;
    Eigen::MatrixXd value;
};

struct RunReport {
    std::string command;
    std::string version;
    std::vector<std::pair<std::string, std::string>> config;
    std::vector<Check> checks;
    std::vector<Table> tables;
    std::vector<Curve> curves;
    std::vector<NamedMatrix> matrices;
    std::vector<std::string> notes;
    double wall_seconds = 0.0;

    void check(std::string name, bool ok, std::string detail = {});
    void inconclusive(std::string name, std::string detail = {});
    const Table* table(const std::string& name) const;

    /// 0 all pass, 1 any failure, 3 inconclusive without failures.
    int exit_code() const;
};

/// Round-trippable decimal with 17 significant digits.
std::string cell(double v);
std::string cell(std::size_t v);
std::string cell(bool v);

/// RFC 4180: fields containing a comma, quote or line break are quoted, quotes doubled.
std::string csv_field(const std::string& s);
std::string to_csv(const Table& t);
/// "rows cols" header, then one row-major line per row.
std::string to_matrix_text(const Eigen::MatrixXd& m);
std::string to_dat(const Curve& c);
std::string to_text(const RunReport& r);
/// gnuplot script plotting every curve of the report.
std::string plot_script(const RunReport& r);

/// Writes report.txt, <table>.csv, <curve>.dat and <matrix>.txt into dir.
void write_report(const RunReport& r, const std::filesystem::path& dir, bool with_plot_script);

/// Exclusive lock file inside an output directory, removed on destruction.
class OutputLock {
public:
    explicit OutputLock(const std::filesystem::path& dir);
    ~OutputLock();
    OutputLock(const OutputLock&) = delete;
    OutputLock& operator=(const OutputLock&) = delete;

private:
    std::filesystem::path path_;
};

} // namespace lossless::harness
