#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "llmchess/chess/board.hpp"

namespace llmchess::prompt {

/// Pseudo: geometric attacks, pins ignored. PinAware: a relation holds only
/// when the capture would be a legal move.
enum class RelationMode { Pseudo, PinAware };

std::string_view relation_mode_name(RelationMode m) noexcept;  // "pseudo", "pin-aware"
RelationMode relation_mode_from_name(std::string_view name);

struct PieceRelations {
    chess::Piece piece;
    chess::Square square;
    std::vector<chess::Square> targets;    // enemy pieces it attacks
    std::vector<chess::Square> attackers;  // enemy pieces attacking it
    std::vector<chess::Square> defenders;  // friendly pieces attacking it
    /// Set on the pawn that just made a double push when an enemy pawn can take it en passant.
    std::optional<chess::Square> en_passant_square;
};

struct SideDescription {
    chess::Color color = chess::Color::White;
    /// Indexed by PieceType (King, Queen, Rook, Bishop, Knight, Pawn order in the text).
    std::array<int, 7> counts{};
    std::vector<PieceRelations> pieces;  // a1 -> h8
    bool kingside = false;
    bool queenside = false;
};

struct BoardDescription {
    SideDescription white;
    SideDescription black;
};

BoardDescription describe(const chess::Board& board, RelationMode mode = RelationMode::Pseudo);
std::string render_description(const chess::Board& board, const BoardDescription& d);
std::string describe_board(const chess::Board& board, RelationMode mode = RelationMode::Pseudo);

}  // namespace llmchess::prompt
