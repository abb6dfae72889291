#include "wdg/io.hpp"

#include <ostream>

#include "wdg/error.hpp"

namespace wdg {

void write_vtk_fields(std::ostream& os, const DgSpace& space,
                      const std::vector<std::pair<std::string, const FieldVector*>>& fields,
                      double time) {
    const Mesh& mesh = space.mesh();
    const std::size_t ne = mesh.num_elements();
    const auto old = os.precision(12);
    os << "# vtk DataFile Version 3.0\n";
    os << "dG fields t=" << time << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << 3 * ne << " double\n";
    for (std::size_t k = 0; k < ne; ++k) {
        for (const Point& p : mesh.element_points(k)) os << p.x << ' ' << p.y << " 0\n";
    }
    os << "CELLS " << ne << ' ' << 4 * ne << '\n';
    for (std::size_t k = 0; k < ne; ++k) os << "3 " << 3 * k << ' ' << 3 * k + 1 << ' ' << 3 * k + 2 << '\n';
    os << "CELL_TYPES " << ne << '\n';
    for (std::size_t k = 0; k < ne; ++k) os << "5\n";
    os << "FIELD FieldData 1\nTIME 1 1 double\n" << time << '\n';
    os << "POINT_DATA " << 3 * ne << '\n';
    const Point corners[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (const auto& [name, field] : fields) {
        if (&field->space() != &space) throw ConfigError("write_vtk_fields: field from another space");
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (std::size_t k = 0; k < ne; ++k) {
            for (const Point& xi : corners) os << field->eval(k, xi) << '\n';
        }
    }
    os.precision(old);
}

}  // namespace wdg
