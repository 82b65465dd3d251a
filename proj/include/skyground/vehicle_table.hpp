// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace skyground::vehicles {

enum class Powertrain { ICE, BEV, PHEV, HEV, Other };

std::string_view to_string(Powertrain p) noexcept;
std::optional<Powertrain> parse_powertrain(std::string_view text) noexcept;

struct VehicleRecord {
    std::string brand;
    std::string model;
    double length_mm = 0.0;
    double width_mm = 0.0;
    double height_mm = 0.0;
    Powertrain powertrain = Powertrain::Other;
    double price = 0.0;
    int doors = 0;
    int seats = 0;

    std::string display_name() const { return brand + " " + model; }
};

struct DimensionsMm {
    double length = 0.0;
    double width = 0.0;
    double height = 0.0;
};

// Lower-cases ASCII and trims surrounding whitespace; key normalization for
// case-insensitive lookups.
std::string fold_key(std::string_view text);

/// Immutable vehicle parameter table sorted by (brand, model).
class VehicleTable {
public:
    VehicleTable() = default;
    // Validates, sorts and rejects duplicate brand+model keys.
    explicit VehicleTable(std::vector<VehicleRecord> records);

    const std::vector<VehicleRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }
    bool empty() const noexcept { return records_.empty(); }

    /// Nearest record by unweighted Euclidean distance over (L, W, H) in mm.
    /// Ties go to the first record in (brand, model) order.
    /// Throws Error(EmptyTable).
    const VehicleRecord& match_dimensions(const DimensionsMm& dims) const;

    // Case-insensitive, whitespace-trimmed exact match. Throws Error(NotFound).
    const VehicleRecord& lookup(std::string_view brand, std::string_view model) const;

    // Resolves "<brand> <model>" where either part may contain spaces.
    const VehicleRecord& lookup_name(std::string_view name) const;

    // Smallest pairwise Euclidean distance between record dimensions (mm).
    double min_dimension_gap() const;

private:
    std::vector<VehicleRecord> records_;
};

/// CSV with header `brand,model,length_mm,width_mm,height_mm,powertrain,price,doors,seats`.
/// Throws ParseError (with 1-based row, header = row 1), Error(DuplicateKey)
/// or Error(EmptyTable).
VehicleTable load_table(const std::filesystem::path& path);
VehicleTable parse_table(std::istream& in);

void write_table(std::ostream& out, const VehicleTable& table);

}  // namespace skyground::vehicles
