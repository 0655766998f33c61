#include "fmpl/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fmpl {

json grid_metadata(const Grid& g) {
    return json{{"dim", g.dim()},
                {"nodes_per_axis", g.nodes_per_axis()},
                {"half_width", g.half_width()},
                {"spacing", g.spacing()}};
}

void write_field_csv(const std::filesystem::path& path, const ComplexField& u) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const Grid& g = u.grid();
    out << "# " << grid_metadata(g).dump() << "\n";
    for (int a = 0; a < g.dim(); ++a) out << "i" << a << ",";
    out << "re,im\n";
    out.precision(17);
    for (std::size_t k = 0; k < u.size(); ++k) {
        const auto idx = g.unflatten(k);
        for (int a = 0; a < g.dim(); ++a) out << idx[static_cast<std::size_t>(a)] << ",";
        out << u[k].real() << "," << u[k].imag() << "\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

ComplexField read_field_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0)
        throw std::runtime_error(path.string() + ": missing JSON grid header");
    const json meta = json::parse(line.substr(2));
    GridPtr grid = make_grid(meta.at("dim").get<int>(), meta.at("nodes_per_axis").get<int>(),
                             meta.at("half_width").get<double>());
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": missing column row");

    ComplexField u(grid);
    std::vector<bool> seen(grid->size(), false);
    const int dim = grid->dim();
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::array<int, 3> idx{0, 0, 0};
        std::string cell;
        for (int a = 0; a < dim; ++a) {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error(path.string() + ": short row '" + line + "'");
            idx[static_cast<std::size_t>(a)] = std::stoi(cell);
        }
        double re = 0.0, im = 0.0;
        if (!std::getline(ss, cell, ',')) throw std::runtime_error(path.string() + ": missing re");
        re = std::stod(cell);
        if (!std::getline(ss, cell, ',')) throw std::runtime_error(path.string() + ": missing im");
        im = std::stod(cell);
        if (!grid->index_in_range(idx))
            throw std::runtime_error(path.string() + ": index out of range in row '" + line + "'");
        const std::size_t k = grid->flatten(idx);
        u[k] = cplx{re, im};
        seen[k] = true;
        ++rows;
    }
    if (rows != grid->size())
        throw std::runtime_error(path.string() + ": expected " + std::to_string(grid->size()) +
                                 " rows, got " + std::to_string(rows));
    for (bool b : seen)
        if (!b) throw std::runtime_error(path.string() + ": duplicate rows leave nodes unset");
    return u;
}

void write_curve_csv(const std::filesystem::path& path, const std::string& x_name,
                     const std::string& y_name,
                     const std::vector<std::pair<double, double>>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out.precision(17);
    out << x_name << "," << y_name << "\n";
    for (const auto& [x, y] : curve) out << x << "," << y << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return json::parse(in);
}

}  // namespace fmpl
