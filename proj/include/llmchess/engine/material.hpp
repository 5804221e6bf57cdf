#pragma once

#include <vector>

#include "llmchess/engine/engine.hpp"

namespace llmchess::engine {

/// One-ply material search, in process. Scores each legal move by the
/// material balance it leaves (mover's view; P=100 N=300 B=300 R=500 Q=900),
/// mating moves as "mate 1". Ties go to the more central destination, then
/// to the smaller UCI string. tools/fake_uci_engine speaks UCI on top of it.
class MaterialEngine final : public Engine {
public:
    std::vector<RankedMove> top_moves(const chess::Board& board, int k) override;

    /// Every legal move, ranked.
    static std::vector<RankedMove> rank_all(const chess::Board& board);

protected:
    int evaluation_breadth() const override { return 3; }
};

int material_balance(const chess::Board& board, chess::Color pov) noexcept;

}  // namespace llmchess::engine
