#include "bcvi/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string_view>

namespace bcvi {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::optional<double> parse_number(std::string_view s)
{
    s = trim(s);
    if (s.empty())
        return std::nullopt;
    if (s.front() == '+')
        s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

std::vector<std::string_view> split_row(std::string_view line)
{
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return cells;
}

// Hungarian method (shortest augmenting path form) on a square cost matrix.
// Returns, for each row, the column assigned to it.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost)
{
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j])
                    continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] != 0)
            row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

// Maps arbitrary ids to 0..m-1 in order of first appearance.
std::vector<int> compact_ids(std::span<const int> ids, int& count)
{
    std::map<int, int> index;
    std::vector<int> out;
    out.reserve(ids.size());
    for (int id : ids) {
        auto [it, inserted] = index.emplace(id, static_cast<int>(index.size()));
        out.push_back(it->second);
    }
    count = static_cast<int>(index.size());
    return out;
}

} // namespace

Dataset Dataset::make(Eigen::MatrixXd points, std::optional<std::vector<int>> labels,
                      std::string name)
{
    if (points.rows() < 2)
        throw DataError("dataset needs at least 2 points, got " + std::to_string(points.rows()));
    if (points.cols() < 1)
        throw DataError("dataset needs at least 1 dimension");
    for (Eigen::Index i = 0; i < points.rows(); ++i)
        for (Eigen::Index j = 0; j < points.cols(); ++j)
            if (!std::isfinite(points(i, j)))
                throw DataError("non-finite coordinate at row " + std::to_string(i + 1) +
                                ", column " + std::to_string(j + 1));

    Dataset d;
    if (labels) {
        if (static_cast<Eigen::Index>(labels->size()) != points.rows())
            throw DataError("label count " + std::to_string(labels->size()) +
                            " does not match point count " + std::to_string(points.rows()));
        int count = 0;
        auto compact = compact_ids(*labels, count);
        for (int& l : compact)
            ++l;
        d.labels_ = std::move(compact);
        d.num_classes_ = count;
    }
    d.points_ = std::move(points);
    d.name_ = std::move(name);
    return d;
}

CsvError::CsvError(CsvErrorKind kind, std::size_t row, std::size_t column, const std::string& what)
    : Error(kind == CsvErrorKind::missing_file ? ErrorClass::io : ErrorClass::data, what),
      kind_(kind), row_(row), column_(column)
{
}

Dataset parse_csv(const std::string& text, const std::optional<std::string>& label_column,
                  std::string name)
{
    struct Line {
        std::size_t number;
        std::vector<std::string_view> cells;
    };
    std::vector<Line> lines;
    std::string_view rest(text);
    std::size_t number = 0;
    while (!rest.empty()) {
        auto nl = rest.find('\n');
        auto raw = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        ++number;
        if (trim(raw).empty())
            continue;
        lines.push_back({number, split_row(raw)});
    }
    if (lines.empty())
        throw CsvError(CsvErrorKind::empty_file, 0, 0, "empty CSV input");

    bool has_header = std::none_of(lines.front().cells.begin(), lines.front().cells.end(),
                                   [](std::string_view c) { return parse_number(c).has_value(); });
    const std::size_t width = lines.front().cells.size();

    std::optional<std::size_t> label_idx;
    if (label_column) {
        if (!has_header)
            throw CsvError(CsvErrorKind::bad_label_column, 1, 0,
                           "label column '" + *label_column + "' requested but file has no header");
        const auto& hdr = lines.front().cells;
        for (std::size_t c = 0; c < hdr.size(); ++c)
            if (trim(hdr[c]) == *label_column)
                label_idx = c;
        if (!label_idx)
            throw CsvError(CsvErrorKind::bad_label_column, lines.front().number, 0,
                           "no header column named '" + *label_column + "'");
    }

    const std::size_t first = has_header ? 1 : 0;
    const std::size_t rows = lines.size() - first;
    if (rows == 0)
        throw CsvError(CsvErrorKind::empty_file, 0, 0, "CSV has a header but no data rows");
    const std::size_t cols = width - (label_idx ? 1 : 0);

    Eigen::MatrixXd points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::vector<int> labels;
    for (std::size_t r = 0; r < rows; ++r) {
        const auto& line = lines[first + r];
        if (line.cells.size() != width)
            throw CsvError(CsvErrorKind::ragged_row, line.number, 0,
                           "row " + std::to_string(line.number) + " has " +
                               std::to_string(line.cells.size()) + " cells, expected " +
                               std::to_string(width));
        Eigen::Index out_col = 0;
        for (std::size_t c = 0; c < width; ++c) {
            auto v = parse_number(line.cells[c]);
            if (!v)
                throw CsvError(CsvErrorKind::non_numeric, line.number, c + 1,
                               "non-numeric cell at row " + std::to_string(line.number) +
                                   ", column " + std::to_string(c + 1) + ": '" +
                                   std::string(trim(line.cells[c])) + "'");
            if (label_idx && c == *label_idx) {
                if (*v != std::floor(*v) || std::abs(*v) > std::numeric_limits<int>::max())
                    throw CsvError(CsvErrorKind::non_numeric, line.number, c + 1,
                                   "label at row " + std::to_string(line.number) +
                                       " is not an integer");
                labels.push_back(static_cast<int>(*v));
            } else {
                points(static_cast<Eigen::Index>(r), out_col++) = *v;
            }
        }
    }
    std::optional<std::vector<int>> maybe_labels;
    if (label_idx)
        maybe_labels = std::move(labels);
    return Dataset::make(std::move(points), std::move(maybe_labels), std::move(name));
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& label_column)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CsvError(CsvErrorKind::missing_file, 0, 0, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), label_column, path.stem().string());
}

std::string to_csv(const Dataset& data)
{
    std::ostringstream out;
    out.precision(17);
    const auto& x = data.points();
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        out << (j ? "," : "") << 'x' << (j + 1);
    if (data.labels())
        out << ",label";
    out << '\n';
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            out << (j ? "," : "") << x(i, j);
        if (data.labels())
            out << ',' << (*data.labels())[static_cast<std::size_t>(i)];
        out << '\n';
    }
    return out.str();
}

void write_csv(const Dataset& data, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << to_csv(data);
    if (!out)
        throw IoError("write failed for " + path.string());
}

void validate(const MixtureSpec& spec)
{
    if (spec.components.empty())
        throw DataError("mixture has no components");
    if (spec.total_n < spec.components.size())
        throw DataError("total_n " + std::to_string(spec.total_n) + " is smaller than the " +
                        std::to_string(spec.components.size()) + " components");
    const auto dim = spec.components.front().center.size();
    if (dim < 1)
        throw DataError("mixture components need at least one dimension");
    double total = 0.0;
    for (std::size_t c = 0; c < spec.components.size(); ++c) {
        const auto& comp = spec.components[c];
        const auto tag = "component " + std::to_string(c + 1);
        if (!(comp.weight > 0.0) || !std::isfinite(comp.weight))
            throw DataError(tag + ": weight must be positive");
        if (comp.center.size() != dim || comp.spread.size() != dim)
            throw DataError(tag + ": center/spread dimension mismatch");
        if (!comp.center.allFinite())
            throw DataError(tag + ": non-finite center");
        if (!(comp.spread.array() > 0.0).all() || !comp.spread.allFinite())
            throw DataError(tag + ": spreads must be positive");
        total += comp.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw DataError("mixture weights sum to " + std::to_string(total) + ", expected 1");
}

Dataset generate_mixture(const MixtureSpec& spec)
{
    validate(spec);
    const std::size_t m = spec.components.size();
    const auto dim = spec.components.front().center.size();

    // One point per component up front, the rest by largest remainder.
    std::vector<std::size_t> counts(m, 1);
    const std::size_t free_n = spec.total_n - m;
    std::vector<double> remainder(m);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < m; ++c) {
        const double share = spec.components[c].weight * static_cast<double>(free_n);
        const auto whole = static_cast<std::size_t>(std::floor(share));
        counts[c] += whole;
        assigned += whole;
        remainder[c] = share - static_cast<double>(whole);
    }
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t i = 0; assigned < free_n; ++i, ++assigned)
        ++counts[order[i % m]];

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);

    Eigen::MatrixXd points(static_cast<Eigen::Index>(spec.total_n), dim);
    std::vector<int> labels;
    labels.reserve(spec.total_n);
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < m; ++c) {
        const auto& comp = spec.components[c];
        for (std::size_t i = 0; i < counts[c]; ++i, ++row) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                const double z = comp.shape == ComponentShape::gaussian ? normal(rng) : uniform(rng);
                points(row, j) = comp.center(j) + comp.spread(j) * z;
            }
            labels.push_back(static_cast<int>(c) + 1);
        }
    }
    return Dataset::make(std::move(points), std::move(labels), "mixture");
}

MixtureSpec gaussian_blobs(const std::vector<Eigen::VectorXd>& centers, double spread,
                           std::size_t total_n, std::uint64_t seed)
{
    MixtureSpec spec;
    spec.total_n = total_n;
    spec.seed = seed;
    for (const auto& c : centers) {
        MixtureComponent comp;
        comp.weight = 1.0 / static_cast<double>(centers.size());
        comp.center = c;
        comp.spread = Eigen::VectorXd::Constant(c.size(), spread);
        spec.components.push_back(std::move(comp));
    }
    return spec;
}

double clustering_accuracy(std::span<const int> labels, std::span<const int> assignments)
{
    if (labels.size() != assignments.size())
        throw DataError("accuracy: " + std::to_string(labels.size()) + " labels vs " +
                        std::to_string(assignments.size()) + " assignments");
    if (labels.empty())
        throw DataError("accuracy: empty input");

    int num_classes = 0, num_clusters = 0;
    const auto cls = compact_ids(labels, num_classes);
    const auto clu = compact_ids(assignments, num_clusters);
    const int side = std::max(num_classes, num_clusters);

    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(side, side);
    for (std::size_t i = 0; i < cls.size(); ++i)
        counts(cls[i], clu[i]) += 1.0;

    const auto match = min_cost_assignment(-counts);
    double matched = 0.0;
    for (int r = 0; r < side; ++r)
        matched += counts(r, match[static_cast<std::size_t>(r)]);
    return matched / static_cast<double>(labels.size());
}

} // namespace bcvi
