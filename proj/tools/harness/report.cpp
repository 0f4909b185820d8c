#include "report.hpp"

#include <lossless/errors.hpp>

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace lossless::harness {

void Table::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size())
        throw Error("table " + name + ": row has " + std::to_string(row.size()) +
                    " cells, expected " + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

void RunReport::check(std::string name, bool ok, std::string detail)
{
    checks.push_back({std::move(name), ok ? CheckStatus::pass : CheckStatus::fail, std::move(detail)});
}

void RunReport::inconclusive(std::string name, std::string detail)
{
    checks.push_back({std::move(name), CheckStatus::inconclusive, std::move(detail)});
}

const Table* RunReport::table(const std::string& name) const
{
    for (const auto& t : tables)
        if (t.name == name)
            return &t;
    return nullptr;
}

int RunReport::exit_code() const
{
    bool undecided = false;
    for (const auto& c : checks) {
        if (c.status == CheckStatus::fail)
            return 1;
        undecided = undecided || c.status == CheckStatus::inconclusive;
    }
    return undecided ? 3 : 0;
}

std::string cell(double v)
{
    std::ostringstream out;
    out << std::setprecision(17) << v;
    return out.str();
}

std::string cell(std::size_t v)
{
    return std::to_string(v);
}

std::string cell(bool v)
{
    return v ? "true" : "false";
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string to_csv(const Table& t)
{
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i)
                out += ',';
            out += csv_field(cells[i]);
        }
        out += "\r\n";
    };
    line(t.columns);
    for (const auto& r : t.rows)
        line(r);
    return out;
}

std::string to_matrix_text(const Eigen::MatrixXd& m)
{
    std::ostringstream out;
    out << std::setprecision(17);
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
    return out.str();
}

std::string to_dat(const Curve& c)
{
    std::ostringstream out;
    out << std::setprecision(17);
    out << "# " << c.x_label << ' ' << c.y_label << '\n';
    for (std::size_t i = 0; i < c.x.size(); ++i)
        out << c.x[i] << ' ' << c.y[i] << '\n';
    return out.str();
}

namespace {

const char* status_word(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass:
        return "PASS";
    case CheckStatus::fail:
        return "FAIL";
    case CheckStatus::inconclusive:
        return "INCONCLUSIVE";
    }
    return "?";
}

} // namespace

std::string to_text(const RunReport& r)
{
    std::ostringstream out;
    out << "lossless-approx " << r.command << '\n';
    out << "version: " << r.version << '\n';
    out << "wall-clock: " << std::setprecision(6) << r.wall_seconds << " s\n\n";
    out << "[config]\n";
    for (const auto& [k, v] : r.config)
        out << k << " = " << v << '\n';
    out << "\n[checks]\n";
    for (const auto& c : r.checks) {
        out << status_word(c.status) << "  " << c.name;
        if (!c.detail.empty())
            out << "  (" << c.detail << ')';
        out << '\n';
    }
    if (!r.notes.empty()) {
        out << "\n[notes]\n";
        for (const auto& n : r.notes)
            out << "- " << n << '\n';
    }
    out << "\n[outputs]\n";
    for (const auto& t : r.tables)
        out << t.name << ".csv  (" << t.rows.size() << " rows)\n";
    for (const auto& c : r.curves)
        out << c.name << ".dat\n";
    for (const auto& m : r.matrices)
        out << m.name << ".txt  (" << m.value.rows() << 'x' << m.value.cols() << ")\n";
    out << "\nexit code: " << r.exit_code() << '\n';
    return out.str();
}

std::string plot_script(const RunReport& r)
{
    std::ostringstream out;
    out << "set terminal pngcairo size 900,600\n";
    for (const auto& c : r.curves) {
        out << "set output '" << c.name << ".png'\n";
        out << "set xlabel '" << c.x_label << "'\nset ylabel '" << c.y_label << "'\n";
        out << "plot '" << c.name << ".dat' using 1:2 with lines title '" << c.name << "'\n";
    }
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& p, const std::string& text)
{
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot write " + p.string());
    f << text;
}

} // namespace

void write_report(const RunReport& r, const std::filesystem::path& dir, bool with_plot_script)
{
    std::filesystem::create_directories(dir);
    for (const auto& t : r.tables)
        write_file(dir / (t.name + ".csv"), to_csv(t));
    for (const auto& c : r.curves)
        write_file(dir / (c.name + ".dat"), to_dat(c));
    for (const auto& m : r.matrices)
        write_file(dir / (m.name + ".txt"), to_matrix_text(m.value));
    if (with_plot_script && !r.curves.empty())
        write_file(dir / "plot.gp", plot_script(r));
    write_file(dir / "report.txt", to_text(r));
}

OutputLock::OutputLock(const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    path_ = dir / ".lossless-approx.lock";
    std::FILE* f = std::fopen(path_.c_str(), "wx");
    if (!f) {
        path_.clear();
        throw Error("output directory " + dir.string() +
                    " is locked by another run (remove .lossless-approx.lock if stale)");
    }
    std::fclose(f);
}

OutputLock::~OutputLock()
{
    if (!path_.empty()) {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
}

} // namespace lossless::harness
