#include "labeling.hpp"

#include <algorithm>
#include <string>

namespace l0 {

namespace {

bool label_in_chi(const Subdivision& sub, std::uint32_t vid, int label) {
    return (sub.mask(vid) >> (label - 1)) & 1u;
}

void check_label_range(const Subdivision& sub, int label) {
    if (label < 1 || label > static_cast<int>(sub.order()))
        throw ValidationError("label " + std::to_string(label) + " outside 1.." + std::to_string(sub.order()));
}

}  // namespace

ClassicalLabeling ClassicalLabeling::make(SubdivisionPtr sub, std::vector<int> labels) {
    if (!sub) throw StructuralError("labeling without a subdivision");
    if (labels.size() != sub->registry_size())
        throw StructuralError("labeling length does not match registry size");
    for (std::uint32_t vid = 0; vid < labels.size(); ++vid) {
        check_label_range(*sub, labels[vid]);
        if (!label_in_chi(*sub, vid, labels[vid]))
            throw ValidationError("improper labeling: vertex " + std::to_string(vid) + " has label " +
                                  std::to_string(labels[vid]) + " outside its support");
    }
    return ClassicalLabeling(std::move(sub), std::move(labels));
}

L0Labeling::L0Labeling(SubdivisionPtr sub, std::vector<std::vector<int>> labels)
    : sub_(std::move(sub)), labels_(std::move(labels)) {
    if (!sub_) throw StructuralError("labeling without a subdivision");
    if (labels_.size() != sub_->registry_size())
        throw StructuralError("labeling length does not match registry size");
    const std::size_t K = sub_->space()->atom_count();
    for (const auto& per_atom : labels_) {
        if (per_atom.size() != K) throw StructuralError("labeling row length does not match atom count");
        for (int l : per_atom) check_label_range(*sub_, l);
    }
}

std::optional<LabelingViolation> L0Labeling::properness_violation() const {
    const std::size_t K = sub_->space()->atom_count();
    for (std::uint32_t vid = 0; vid < labels_.size(); ++vid)
        for (std::size_t a = 0; a < K; ++a)
            if (!label_in_chi(*sub_, vid, labels_[vid][a]))
                return LabelingViolation{vid, a, labels_[vid][a]};
    return std::nullopt;
}

Label L0Labeling::value_at(const std::vector<std::uint32_t>& assignment) const {
    const std::size_t K = sub_->space()->atom_count();
    if (assignment.size() != K) throw StructuralError("assignment length does not match atom count");
    std::vector<int> values(K);
    for (std::size_t a = 0; a < K; ++a) {
        if (assignment[a] >= labels_.size()) throw StructuralError("assignment references unknown registry vertex");
        values[a] = labels_[assignment[a]][a];
    }
    return Label(space(), static_cast<int>(sub_->order()), std::move(values));
}

std::vector<std::size_t> completely_labeled_cells(const Subdivision& sub, const std::vector<int>& labels) {
    if (labels.size() != sub.registry_size())
        throw StructuralError("labeling length does not match registry size");
    const std::size_t n = sub.order();
    std::vector<std::size_t> out;
    for (std::size_t cid = 0; cid < sub.cell_count(); ++cid) {
        std::uint32_t seen = 0;
        for (std::uint32_t vid : sub.cell(cid)) {
            int l = labels[vid];
            if (l >= 1 && l <= static_cast<int>(n)) seen |= 1u << (l - 1);
        }
        if (seen == (n == 32 ? ~0u : (1u << n) - 1)) out.push_back(cid);
    }
    return out;
}

std::vector<std::size_t> enumerate_completely_labeled(const ClassicalLabeling& psi) {
    std::vector<std::size_t> cells = completely_labeled_cells(*psi.subdivision(), psi.labels());
    if (cells.size() % 2 == 0)
        throw Error("completely labeled cell count is even (" + std::to_string(cells.size()) +
                    "), which contradicts the Sperner parity for a proper labeling");
    return cells;
}

SpernerDecomposition decompose_labeling(const L0Labeling& phi) {
    if (auto v = phi.properness_violation())
        throw ValidationError("improper labeling: vertex " + std::to_string(v->vertex) + " at atom " +
                              std::to_string(v->atom) + " has label " + std::to_string(v->label) +
                              " outside its support");
    const SpacePtr& space = phi.space();
    const std::size_t K = space->atom_count();
    const std::size_t R = phi.subdivision()->registry_size();

    // Group atoms by their full label tuple, in order of first occurrence.
    std::vector<std::vector<std::size_t>> groups;
    std::vector<std::vector<int>> group_tuple;
    for (std::size_t a = 0; a < K; ++a) {
        std::vector<int> tuple(R);
        for (std::uint32_t vid = 0; vid < R; ++vid) tuple[vid] = phi.label(vid, a);
        bool placed = false;
        for (std::size_t g = 0; g < groups.size() && !placed; ++g)
            if (group_tuple[g] == tuple) {
                groups[g].push_back(a);
                placed = true;
            }
        if (!placed) {
            groups.push_back({a});
            group_tuple.push_back(std::move(tuple));
        }
    }

    std::vector<Event> parts;
    std::vector<ClassicalLabeling> labelings;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        parts.push_back(Event::from_atoms(space, groups[g]));
        labelings.push_back(ClassicalLabeling::make(phi.subdivision(), group_tuple[g]));
    }
    return SpernerDecomposition{PartitionOfUnity(space, std::move(parts)), std::move(labelings)};
}

SpernerSearchResult sperner_search(const L0Labeling& phi) {
    SpernerDecomposition dec = decompose_labeling(phi);
    const Subdivision& sub = *phi.subdivision();
    const std::size_t n = sub.order();
    const std::size_t K = phi.space()->atom_count();

    std::vector<std::size_t> cell_of_part;
    std::vector<std::vector<std::uint32_t>> vertices_of_part;
    for (const ClassicalLabeling& psi : dec.parts) {
        std::vector<std::size_t> cells = enumerate_completely_labeled(psi);
        std::size_t chosen = cells.front();
        cell_of_part.push_back(chosen);
        // Reindex so that slot j carries label j+1.
        std::vector<std::uint32_t> slots(n);
        for (std::uint32_t vid : sub.cell(chosen)) slots[psi.label(vid) - 1] = vid;
        vertices_of_part.push_back(std::move(slots));
    }

    std::vector<std::vector<std::uint32_t>> assignment(n, std::vector<std::uint32_t>(K));
    std::vector<Vector<Rat>> verts;
    const std::size_t d = sub.parent().dim();
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<Rat> data(K * d);
        for (std::size_t a = 0; a < K; ++a) {
            std::size_t part = dec.partition.part_of_atom(a);
            std::uint32_t vid = vertices_of_part[part][j];
            assignment[j][a] = vid;
            auto row = sub.registry_point(vid).row(a);
            for (std::size_t i = 0; i < d; ++i) data[a * d + i] = row[i];
        }
        verts.push_back(Vector<Rat>(phi.space(), d, std::move(data)));
    }
    Simplex simplex = Simplex::make(std::move(verts));

    // Postcondition of the search: the extension rule sees constant label j+1
    // on vertex slot j.
    for (std::size_t j = 0; j < n; ++j) {
        Label l = phi.value_at(assignment[j]);
        for (std::size_t a = 0; a < K; ++a)
            if (l.at(a) != static_cast<int>(j) + 1)
                throw Error("sperner search postcondition failed: slot " + std::to_string(j) + " at atom " +
                            std::to_string(a) + " has label " + std::to_string(l.at(a)));
    }

    return SpernerSearchResult{std::move(dec), std::move(cell_of_part), std::move(vertices_of_part),
                               std::move(assignment), std::move(simplex)};
}

}  // namespace l0
