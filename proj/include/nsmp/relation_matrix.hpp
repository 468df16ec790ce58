#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nsmp/types.hpp"

namespace nsmp {

// Boolean sparse matrix: row i lists the column ids j with M(i, j) = 1.
// Stored in CSR layout; weights are implicitly 1.
class RelationMatrix {
   public:
    RelationMatrix() = default;
    RelationMatrix(std::size_t dim, std::span<const std::pair<EntityId, EntityId>> entries);

    std::size_t dim() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t nnz() const { return columns_.size(); }

    std::span<const EntityId> row(EntityId i) const {
        return {columns_.data() + offsets_[i], columns_.data() + offsets_[i + 1]};
    }

    bool contains(EntityId i, EntityId j) const;

   private:
    std::vector<std::size_t> offsets_;
    std::vector<EntityId> columns_;
};

}  // namespace nsmp
