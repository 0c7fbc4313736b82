#pragma once

// Chess rules kernel: squares, pieces, positions, legal move generation,
// SAN parsing/formatting, FEN interchange and attack relations.
//
// All types are immutable values; every function here is pure.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chesscomm/error.hpp"

namespace chesscomm::chess {

class ChessError : public Error {
 public:
  using Error::Error;
};

class UnparseableSan : public ChessError {
 public:
  using ChessError::ChessError;
};

class IllegalMove : public ChessError {
 public:
  using ChessError::ChessError;
  IllegalMove(std::string what, std::size_t ply)
      : ChessError(std::move(what)), ply_(ply) {}

  // 1-based ply number inside a game, when the error came from replaying one.
  std::optional<std::size_t> ply() const { return ply_; }

 private:
  std::optional<std::size_t> ply_;
};

class AmbiguousMove : public ChessError {
 public:
  using ChessError::ChessError;
};

class InvalidFen : public ChessError {
 public:
  using ChessError::ChessError;
};

class InvalidPosition : public ChessError {
 public:
  using ChessError::ChessError;
};

enum class Color : std::uint8_t { White, Black };

constexpr Color opposite(Color c) {
  return c == Color::White ? Color::Black : Color::White;
}

std::string_view color_name(Color c);  // "White" / "Black"

enum class PieceKind : std::uint8_t { Pawn, Knight, Bishop, Rook, Queen, King };

inline constexpr std::array<PieceKind, 6> kAllKinds = {
    PieceKind::Pawn, PieceKind::Knight, PieceKind::Bishop,
    PieceKind::Rook, PieceKind::Queen,  PieceKind::King};

// Uppercase SAN letter: P N B R Q K.
char piece_letter(PieceKind kind);
std::optional<PieceKind> piece_kind_from_letter(char upper);
// Lowercase English name: "pawn", "knight", ...
std::string_view piece_name(PieceKind kind);

struct Piece {
  Color color = Color::White;
  PieceKind kind = PieceKind::Pawn;

  bool operator==(const Piece&) const = default;
};

// A board square. Internally indexed rank-major (a1 = 0, b1 = 1, ..., h8 = 63)
// for array lookup, but ordered file-major (a1 < a2 < ... < a8 < b1 ...),
// which is the ordering every rendered listing uses.
class Square {
 public:
  constexpr Square() = default;
  constexpr Square(int file, int rank)
      : index_(static_cast<std::uint8_t>(rank * 8 + file)) {}

  static constexpr Square from_index(int index) {
    return Square(index % 8, index / 8);
  }
  // Accepts exactly "a1".."h8".
  static std::optional<Square> parse(std::string_view text);

  constexpr int file() const { return index_ % 8; }
  constexpr int rank() const { return index_ / 8; }
  constexpr int index() const { return index_; }
  constexpr int file_major_index() const { return file() * 8 + rank(); }

  std::string name() const;

  constexpr bool operator==(const Square& o) const { return index_ == o.index_; }
  constexpr std::strong_ordering operator<=>(const Square& o) const {
    return file_major_index() <=> o.file_major_index();
  }

 private:
  std::uint8_t index_ = 0;
};

// All 64 squares in rank-major index order.
std::array<Square, 64> all_squares();

struct CastlingRights {
  bool white_king = false;
  bool white_queen = false;
  bool black_king = false;
  bool black_queen = false;

  bool operator==(const CastlingRights&) const = default;
};

class BoardState {
 public:
  // An empty board, white to move. Not valid until kings are placed; used
  // through BoardState::Builder or FEN.
  BoardState() = default;

  static BoardState initial();
  // Standard 6-field FEN (the two counters may be omitted). Validates all
  // position invariants.
  static BoardState from_fen(std::string_view fen);
  std::string fen() const;

  std::optional<Piece> at(Square sq) const;
  Color side_to_move() const { return side_; }
  const CastlingRights& castling() const { return castling_; }
  std::optional<Square> en_passant() const { return en_passant_; }
  int halfmove_clock() const { return halfmove_; }
  int fullmove_number() const { return fullmove_; }

  std::optional<Square> king_square(Color c) const;
  // True when any piece of `by` attacks `sq` (pseudo-legal capture pattern).
  bool is_attacked(Square sq, Color by) const;
  bool in_check() const;

  // Throws InvalidPosition when an invariant is broken: one king per color,
  // no pawns on the back ranks, en-passant square on rank 3/6 behind a
  // just-pushed pawn, side not to move not in check, counters in range.
  void validate() const;

  bool operator==(const BoardState&) const = default;

  class Builder;

 private:
  friend class Builder;
  friend struct BoardAccess;

  std::array<std::uint8_t, 64> cells_{};  // 0 empty, else 1 + color*6 + kind
  Color side_ = Color::White;
  CastlingRights castling_{};
  std::optional<Square> en_passant_;
  int halfmove_ = 0;
  int fullmove_ = 1;
};

// Incremental construction of arbitrary positions (tests, generators).
class BoardState::Builder {
 public:
  Builder& put(Square sq, Piece piece);
  Builder& clear(Square sq);
  Builder& side_to_move(Color c);
  Builder& castling(CastlingRights rights);
  Builder& en_passant(std::optional<Square> sq);
  Builder& counters(int halfmove, int fullmove);
  // Validates and returns the position.
  BoardState build() const;
  // Returns the position without validation.
  BoardState build_unchecked() const { return board_; }

 private:
  BoardState board_;
};

struct MoveFlags {
  bool castle_king = false;
  bool castle_queen = false;
  bool en_passant = false;
  bool check = false;
  bool mate = false;

  bool operator==(const MoveFlags&) const = default;
};

struct MoveRecord {
  Square from;
  Square to;
  Piece moving;
  std::optional<Piece> capture;
  std::optional<PieceKind> promotion;
  std::string san;  // canonical SAN including "+"/"#"
  MoveFlags flags;
  // Annotation glyph that followed the SAN in the source text ("!!", "!",
  // "!?", "?!", "?", "??"); empty when none.
  std::string annotation;

  // Long algebraic form used by UCI, e.g. "e2e4", "e7e8q".
  std::string uci() const;

  bool operator==(const MoveRecord&) const = default;
};

// Complete, sound list of legal moves with SAN filled in. Order: by from
// square then to square (rank-major index), then promotion Q, R, B, N.
std::vector<MoveRecord> legal_moves(const BoardState& board);

bool has_legal_move(const BoardState& board);
bool is_checkmate(const BoardState& board);
bool is_stalemate(const BoardState& board);

// Strips annotation glyphs and check marks before matching.
// Throws UnparseableSan, IllegalMove or AmbiguousMove.
MoveRecord parse_san(const BoardState& board, std::string_view text);

// Minimal SAN with disambiguation and check/mate suffix. Throws IllegalMove.
std::string format_san(const BoardState& board, const MoveRecord& move);

// Accepts "e2e4" / "e7e8q". Throws UnparseableSan or IllegalMove.
MoveRecord parse_uci_move(const BoardState& board, std::string_view text);

// Throws IllegalMove when the move is not legal in `board`.
BoardState apply_move(const BoardState& board, const MoveRecord& move);

// Leaf count of the legal move tree to `depth`.
std::uint64_t perft(const BoardState& board, int depth);

// Equality of placement, side to move, castling rights and en-passant
// square, where the en-passant square is compared only when some pawn can
// actually capture onto it. Ignores the move counters.
bool same_position(const BoardState& a, const BoardState& b);

struct PlacedPiece {
  Piece piece;
  Square square;

  bool operator==(const PlacedPiece&) const = default;
};

struct AttackRelation {
  PlacedPiece attacker;
  PlacedPiece target;

  bool operator==(const AttackRelation&) const = default;
};

enum class AttackMode {
  // X attacks Y iff X has a pseudo-legal capture of Y's square; pins count.
  PseudoLegal,
  // Additionally requires that the capture would not leave X's own king in
  // check (evaluated as if X's side were to move).
  StrictLegal,
};

// Pairs of opposite-colored pieces, ordered by attacker square then target
// square (file-major). Kings can be targets.
std::vector<AttackRelation> attack_relations(
    const BoardState& board, AttackMode mode = AttackMode::PseudoLegal);

// Pieces in a fixed listing order: colors White then Black, kinds
// K, Q, R, B, N, P, squares file-major.
std::vector<PlacedPiece> listed_pieces(const BoardState& board);

}  // namespace chesscomm::chess
