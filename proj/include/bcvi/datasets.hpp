#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bcvi/error.hpp"

namespace bcvi {

/// n x p matrix of observations with optional class labels.
///
/// Construct through `Dataset::make`, which checks the invariants (n >= 2,
/// p >= 1, finite coordinates, one label per row) and compacts arbitrary
/// integer labels to 1..L in order of first appearance.
class Dataset {
public:
    static Dataset make(Eigen::MatrixXd points,
                        std::optional<std::vector<int>> labels = std::nullopt,
                        std::string name = {});

    const Eigen::MatrixXd& points() const noexcept { return points_; }
    const std::optional<std::vector<int>>& labels() const noexcept { return labels_; }
    const std::string& name() const noexcept { return name_; }

    Eigen::Index size() const noexcept { return points_.rows(); }
    Eigen::Index dims() const noexcept { return points_.cols(); }

    /// Number of distinct label classes, 0 when unlabeled.
    int num_classes() const noexcept { return num_classes_; }

private:
    Dataset() = default;

    Eigen::MatrixXd points_;
    std::optional<std::vector<int>> labels_;
    std::string name_;
    int num_classes_ = 0;
};

enum class CsvErrorKind { missing_file, non_numeric, ragged_row, empty_file, bad_label_column };

/// CSV parse failure. `row` and `column` are 1-based file coordinates, 0 when
/// not applicable.
class CsvError : public Error {
public:
    CsvError(CsvErrorKind kind, std::size_t row, std::size_t column, const std::string& what);

    CsvErrorKind kind() const noexcept { return kind_; }
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    CsvErrorKind kind_;
    std::size_t row_;
    std::size_t column_;
};

/// Reads a comma-separated file. A first row with no numeric cell is taken as
/// the header. `label_column` names a header column whose values become labels.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Parses CSV text; `load_csv` reads the file and forwards here.
Dataset parse_csv(const std::string& text,
                  const std::optional<std::string>& label_column = std::nullopt,
                  std::string name = {});

/// Writes a header row `x1,...,xp[,label]` followed by one row per point,
/// with 17 significant digits so that `load_csv` reproduces the values.
void write_csv(const Dataset& data, const std::filesystem::path& path);
std::string to_csv(const Dataset& data);

enum class ComponentShape { gaussian, uniform_box };

struct MixtureComponent {
    double weight = 1.0;
    Eigen::VectorXd center;
    Eigen::VectorXd spread; // standard deviation (gaussian) or half-width (box)
    ComponentShape shape = ComponentShape::gaussian;
};

struct MixtureSpec {
    std::vector<MixtureComponent> components;
    std::size_t total_n = 0;
    std::uint64_t seed = 0;
};

/// Throws DataError unless weights are positive and sum to 1, spreads are
/// positive, all components share one dimension and total_n covers them.
void validate(const MixtureSpec& spec);

/// Samples `total_n` points, grouped by component. Component sizes follow the
/// weights by largest remainder with at least one point each; labels record
/// the generating component (1-based).
Dataset generate_mixture(const MixtureSpec& spec);

/// Equal-weight isotropic gaussian blobs with the given centers.
MixtureSpec gaussian_blobs(const std::vector<Eigen::VectorXd>& centers, double spread,
                           std::size_t total_n, std::uint64_t seed);

/// Fraction of points whose cluster maps onto their class under the best
/// one-to-one matching of clusters to classes. Ids are arbitrary integers.
double clustering_accuracy(std::span<const int> labels, std::span<const int> assignments);

} // namespace bcvi
