#include "chesscomm/chess.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

namespace chesscomm::chess {

namespace {

constexpr std::uint8_t encode(Piece p) {
  return static_cast<std::uint8_t>(1 + static_cast<int>(p.color) * 6 +
                                   static_cast<int>(p.kind));
}

constexpr std::optional<Piece> decode(std::uint8_t code) {
  if (code == 0) return std::nullopt;
  const int v = code - 1;
  return Piece{static_cast<Color>(v / 6), static_cast<PieceKind>(v % 6)};
}

constexpr bool on_board(int file, int rank) {
  return file >= 0 && file < 8 && rank >= 0 && rank < 8;
}

constexpr int forward(Color c) { return c == Color::White ? 1 : -1; }

constexpr std::array<std::pair<int, int>, 8> kKnightSteps = {{
    {1, 2}, {2, 1}, {2, -1}, {1, -2}, {-1, -2}, {-2, -1}, {-2, 1}, {-1, 2}}};
constexpr std::array<std::pair<int, int>, 8> kKingSteps = {{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
constexpr std::array<std::pair<int, int>, 4> kDiagonals = {{
    {1, 1}, {1, -1}, {-1, 1}, {-1, -1}}};
constexpr std::array<std::pair<int, int>, 4> kOrthogonals = {{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}}};

// Bare move used by generation; MoveRecord is derived from it.
struct Move {
  Square from;
  Square to;
  std::optional<PieceKind> promotion;
};

int promotion_rank(std::optional<PieceKind> p) {
  if (!p) return 0;
  switch (*p) {
    case PieceKind::Queen: return 1;
    case PieceKind::Rook: return 2;
    case PieceKind::Bishop: return 3;
    case PieceKind::Knight: return 4;
    default: return 5;
  }
}

}  // namespace

// Grants the implementation write access to BoardState internals.
struct BoardAccess {
  static std::uint8_t& cell(BoardState& b, Square s) { return b.cells_[s.index()]; }
  static std::uint8_t cell(const BoardState& b, Square s) { return b.cells_[s.index()]; }
  static Color& side(BoardState& b) { return b.side_; }
  static CastlingRights& castling(BoardState& b) { return b.castling_; }
  static std::optional<Square>& en_passant(BoardState& b) { return b.en_passant_; }
  static int& halfmove(BoardState& b) { return b.halfmove_; }
  static int& fullmove(BoardState& b) { return b.fullmove_; }
};

namespace {

using A = BoardAccess;

std::optional<Piece> piece_on(const BoardState& b, int file, int rank) {
  return decode(A::cell(b, Square(file, rank)));
}

bool piece_attacks_square(const BoardState& b, Square from, Piece p, Square target) {
  const int df = target.file() - from.file();
  const int dr = target.rank() - from.rank();
  if (df == 0 && dr == 0) return false;
  switch (p.kind) {
    case PieceKind::Pawn:
      return dr == forward(p.color) && std::abs(df) == 1;
    case PieceKind::Knight:
      return (std::abs(df) == 1 && std::abs(dr) == 2) ||
             (std::abs(df) == 2 && std::abs(dr) == 1);
    case PieceKind::King:
      return std::abs(df) <= 1 && std::abs(dr) <= 1;
    default:
      break;
  }
  const bool diagonal = std::abs(df) == std::abs(dr);
  const bool straight = df == 0 || dr == 0;
  if (p.kind == PieceKind::Bishop && !diagonal) return false;
  if (p.kind == PieceKind::Rook && !straight) return false;
  if (p.kind == PieceKind::Queen && !diagonal && !straight) return false;
  const int sf = (df > 0) - (df < 0);
  const int sr = (dr > 0) - (dr < 0);
  int f = from.file() + sf;
  int r = from.rank() + sr;
  while (f != target.file() || r != target.rank()) {
    if (A::cell(b, Square(f, r)) != 0) return false;
    f += sf;
    r += sr;
  }
  return true;
}

BoardState make(const BoardState& board, const Move& m) {
  BoardState b = board;
  const Piece mover = *decode(A::cell(b, m.from));
  const std::uint8_t target_code = A::cell(b, m.to);
  const bool is_pawn = mover.kind == PieceKind::Pawn;
  const bool is_ep = is_pawn && board.en_passant() && m.to == *board.en_passant() &&
                     m.from.file() != m.to.file() && target_code == 0;
  const bool capture = target_code != 0 || is_ep;

  if (is_ep) A::cell(b, Square(m.to.file(), m.from.rank())) = 0;
  A::cell(b, m.to) = m.promotion ? encode(Piece{mover.color, *m.promotion})
                                 : A::cell(b, m.from);
  A::cell(b, m.from) = 0;

  if (mover.kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) {
    const int rank = m.from.rank();
    if (m.to.file() == 6) {
      A::cell(b, Square(5, rank)) = A::cell(b, Square(7, rank));
      A::cell(b, Square(7, rank)) = 0;
    } else {
      A::cell(b, Square(3, rank)) = A::cell(b, Square(0, rank));
      A::cell(b, Square(0, rank)) = 0;
    }
  }

  CastlingRights& cr = A::castling(b);
  if (mover.kind == PieceKind::King) {
    if (mover.color == Color::White) cr.white_king = cr.white_queen = false;
    else cr.black_king = cr.black_queen = false;
  }
  for (Square s : {m.from, m.to}) {
    if (s == Square(0, 0)) cr.white_queen = false;
    if (s == Square(7, 0)) cr.white_king = false;
    if (s == Square(0, 7)) cr.black_queen = false;
    if (s == Square(7, 7)) cr.black_king = false;
  }

  if (is_pawn && std::abs(m.to.rank() - m.from.rank()) == 2) {
    A::en_passant(b) = Square(m.from.file(), (m.from.rank() + m.to.rank()) / 2);
  } else {
    A::en_passant(b) = std::nullopt;
  }
  A::halfmove(b) = (is_pawn || capture) ? 0 : board.halfmove_clock() + 1;
  if (mover.color == Color::Black) A::fullmove(b) = board.fullmove_number() + 1;
  A::side(b) = opposite(mover.color);
  return b;
}

void push_pawn_move(std::vector<Move>& out, Square from, Square to, Color c) {
  const int last = c == Color::White ? 7 : 0;
  if (to.rank() == last) {
    for (PieceKind k : {PieceKind::Queen, PieceKind::Rook, PieceKind::Bishop,
                        PieceKind::Knight}) {
      out.push_back({from, to, k});
    }
  } else {
    out.push_back({from, to, std::nullopt});
  }
}

void generate_pseudo(const BoardState& b, std::vector<Move>& out) {
  const Color us = b.side_to_move();
  const Color them = opposite(us);
  for (int idx = 0; idx < 64; ++idx) {
    const Square from = Square::from_index(idx);
    const auto p = decode(A::cell(b, from));
    if (!p || p->color != us) continue;
    const int f = from.file();
    const int r = from.rank();
    auto enemy_or_empty = [&](int tf, int tr) {
      const auto q = piece_on(b, tf, tr);
      return !q || q->color == them;
    };
    switch (p->kind) {
      case PieceKind::Pawn: {
        const int dir = forward(us);
        const int start = us == Color::White ? 1 : 6;
        if (on_board(f, r + dir) && !piece_on(b, f, r + dir)) {
          push_pawn_move(out, from, Square(f, r + dir), us);
          if (r == start && !piece_on(b, f, r + 2 * dir)) {
            out.push_back({from, Square(f, r + 2 * dir), std::nullopt});
          }
        }
        for (int df : {-1, 1}) {
          const int tf = f + df;
          const int tr = r + dir;
          if (!on_board(tf, tr)) continue;
          const auto q = piece_on(b, tf, tr);
          if (q && q->color == them) {
            push_pawn_move(out, from, Square(tf, tr), us);
          } else if (!q && b.en_passant() && *b.en_passant() == Square(tf, tr)) {
            out.push_back({from, Square(tf, tr), std::nullopt});
          }
        }
        break;
      }
      case PieceKind::Knight:
      case PieceKind::King: {
        const auto& steps = p->kind == PieceKind::Knight ? kKnightSteps : kKingSteps;
        for (auto [df, dr] : steps) {
          if (on_board(f + df, r + dr) && enemy_or_empty(f + df, r + dr)) {
            out.push_back({from, Square(f + df, r + dr), std::nullopt});
          }
        }
        break;
      }
      default: {
        auto slide = [&](const std::array<std::pair<int, int>, 4>& dirs) {
          for (auto [df, dr] : dirs) {
            int tf = f + df;
            int tr = r + dr;
            while (on_board(tf, tr)) {
              const auto q = piece_on(b, tf, tr);
              if (q && q->color == us) break;
              out.push_back({from, Square(tf, tr), std::nullopt});
              if (q) break;
              tf += df;
              tr += dr;
            }
          }
        };
        if (p->kind != PieceKind::Rook) slide(kDiagonals);
        if (p->kind != PieceKind::Bishop) slide(kOrthogonals);
        break;
      }
    }
  }

  // Castling: rights, home squares, empty path, no attacked transit square.
  const int home = us == Color::White ? 0 : 7;
  const Square king_home(4, home);
  const auto king = decode(A::cell(b, king_home));
  if (!king || *king != Piece{us, PieceKind::King}) return;
  const Piece rook{us, PieceKind::Rook};
  const bool can_k = us == Color::White ? b.castling().white_king : b.castling().black_king;
  const bool can_q = us == Color::White ? b.castling().white_queen : b.castling().black_queen;
  if ((can_k || can_q) && b.is_attacked(king_home, them)) return;
  if (can_k && piece_on(b, 7, home) == rook && !piece_on(b, 5, home) &&
      !piece_on(b, 6, home) && !b.is_attacked(Square(5, home), them) &&
      !b.is_attacked(Square(6, home), them)) {
    out.push_back({king_home, Square(6, home), std::nullopt});
  }
  if (can_q && piece_on(b, 0, home) == rook && !piece_on(b, 1, home) &&
      !piece_on(b, 2, home) && !piece_on(b, 3, home) &&
      !b.is_attacked(Square(3, home), them) && !b.is_attacked(Square(2, home), them)) {
    out.push_back({king_home, Square(2, home), std::nullopt});
  }
}

bool leaves_king_safe(const BoardState& child, Color mover) {
  const auto k = child.king_square(mover);
  return k && !child.is_attacked(*k, opposite(mover));
}

std::vector<Move> generate_legal(const BoardState& b) {
  std::vector<Move> pseudo;
  pseudo.reserve(64);
  generate_pseudo(b, pseudo);
  std::vector<Move> legal;
  legal.reserve(pseudo.size());
  for (const Move& m : pseudo) {
    if (leaves_king_safe(make(b, m), b.side_to_move())) legal.push_back(m);
  }
  return legal;
}

bool same_move(const Move& a, const Move& b) {
  return a.from == b.from && a.to == b.to && a.promotion == b.promotion;
}

std::string san_for(const BoardState& b, const Move& m, const std::vector<Move>& legal,
                    const BoardState& child) {
  const Piece mover = *decode(A::cell(b, m.from));
  std::string san;
  if (mover.kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) {
    san = m.to.file() == 6 ? "O-O" : "O-O-O";
  } else {
    const bool capture =
        A::cell(b, m.to) != 0 ||
        (mover.kind == PieceKind::Pawn && m.from.file() != m.to.file());
    if (mover.kind == PieceKind::Pawn) {
      if (capture) {
        san += static_cast<char>('a' + m.from.file());
        san += 'x';
      }
      san += m.to.name();
      if (m.promotion) {
        san += '=';
        san += piece_letter(*m.promotion);
      }
    } else {
      san += piece_letter(mover.kind);
      bool clash = false;
      bool file_clash = false;
      bool rank_clash = false;
      for (const Move& o : legal) {
        if (o.to != m.to || o.from == m.from) continue;
        if (A::cell(b, o.from) != A::cell(b, m.from)) continue;
        clash = true;
        if (o.from.file() == m.from.file()) file_clash = true;
        if (o.from.rank() == m.from.rank()) rank_clash = true;
      }
      if (clash) {
        if (!file_clash) {
          san += static_cast<char>('a' + m.from.file());
        } else if (!rank_clash) {
          san += static_cast<char>('1' + m.from.rank());
        } else {
          san += m.from.name();
        }
      }
      if (capture) san += 'x';
      san += m.to.name();
    }
  }
  if (child.in_check()) san += has_legal_move(child) ? "+" : "#";
  return san;
}

MoveRecord to_record(const BoardState& b, const Move& m, const std::vector<Move>& legal) {
  MoveRecord rec;
  rec.from = m.from;
  rec.to = m.to;
  rec.moving = *decode(A::cell(b, m.from));
  rec.promotion = m.promotion;
  const bool is_pawn = rec.moving.kind == PieceKind::Pawn;
  if (auto cap = decode(A::cell(b, m.to))) {
    rec.capture = cap;
  } else if (is_pawn && m.from.file() != m.to.file()) {
    rec.capture = Piece{opposite(rec.moving.color), PieceKind::Pawn};
    rec.flags.en_passant = true;
  }
  if (rec.moving.kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) {
    (m.to.file() == 6 ? rec.flags.castle_king : rec.flags.castle_queen) = true;
  }
  const BoardState child = make(b, m);
  rec.flags.check = child.in_check();
  rec.flags.mate = rec.flags.check && !has_legal_move(child);
  rec.san = san_for(b, m, legal, child);
  return rec;
}

const Move* find_legal(const std::vector<Move>& legal, Square from, Square to,
                       std::optional<PieceKind> promotion) {
  for (const Move& m : legal) {
    if (same_move(m, Move{from, to, promotion})) return &m;
  }
  return nullptr;
}

std::string describe(const BoardState& b) { return "position " + b.fen(); }

bool is_annotation_char(char c) { return c == '!' || c == '?'; }

}  // namespace

std::string_view color_name(Color c) { return c == Color::White ? "White" : "Black"; }

char piece_letter(PieceKind kind) {
  static constexpr char kLetters[] = {'P', 'N', 'B', 'R', 'Q', 'K'};
  return kLetters[static_cast<int>(kind)];
}

std::optional<PieceKind> piece_kind_from_letter(char upper) {
  switch (upper) {
    case 'P': return PieceKind::Pawn;
    case 'N': return PieceKind::Knight;
    case 'B': return PieceKind::Bishop;
    case 'R': return PieceKind::Rook;
    case 'Q': return PieceKind::Queen;
    case 'K': return PieceKind::King;
    default: return std::nullopt;
  }
}

std::string_view piece_name(PieceKind kind) {
  static constexpr std::string_view kNames[] = {"pawn", "knight", "bishop",
                                                "rook", "queen",  "king"};
  return kNames[static_cast<int>(kind)];
}

std::optional<Square> Square::parse(std::string_view text) {
  if (text.size() != 2) return std::nullopt;
  if (text[0] < 'a' || text[0] > 'h' || text[1] < '1' || text[1] > '8') return std::nullopt;
  return Square(text[0] - 'a', text[1] - '1');
}

std::string Square::name() const {
  return {static_cast<char>('a' + file()), static_cast<char>('1' + rank())};
}

std::array<Square, 64> all_squares() {
  std::array<Square, 64> out;
  for (int i = 0; i < 64; ++i) out[i] = Square::from_index(i);
  return out;
}

BoardState BoardState::initial() {
  return from_fen("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1");
}

std::optional<Piece> BoardState::at(Square sq) const { return decode(cells_[sq.index()]); }

std::optional<Square> BoardState::king_square(Color c) const {
  const std::uint8_t code = encode(Piece{c, PieceKind::King});
  for (int i = 0; i < 64; ++i) {
    if (cells_[i] == code) return Square::from_index(i);
  }
  return std::nullopt;
}

bool BoardState::is_attacked(Square sq, Color by) const {
  const int f = sq.file();
  const int r = sq.rank();
  const int pawn_rank = r - forward(by);
  for (int df : {-1, 1}) {
    if (on_board(f + df, pawn_rank) &&
        piece_on(*this, f + df, pawn_rank) == Piece{by, PieceKind::Pawn}) {
      return true;
    }
  }
  for (auto [df, dr] : kKnightSteps) {
    if (on_board(f + df, r + dr) &&
        piece_on(*this, f + df, r + dr) == Piece{by, PieceKind::Knight}) {
      return true;
    }
  }
  for (auto [df, dr] : kKingSteps) {
    if (on_board(f + df, r + dr) &&
        piece_on(*this, f + df, r + dr) == Piece{by, PieceKind::King}) {
      return true;
    }
  }
  auto ray_hits = [&](const std::array<std::pair<int, int>, 4>& dirs, PieceKind slider) {
    for (auto [df, dr] : dirs) {
      int tf = f + df;
      int tr = r + dr;
      while (on_board(tf, tr)) {
        if (const auto q = piece_on(*this, tf, tr)) {
          if (q->color == by && (q->kind == slider || q->kind == PieceKind::Queen)) return true;
          break;
        }
        tf += df;
        tr += dr;
      }
    }
    return false;
  };
  return ray_hits(kDiagonals, PieceKind::Bishop) || ray_hits(kOrthogonals, PieceKind::Rook);
}

bool BoardState::in_check() const {
  const auto k = king_square(side_);
  return k && is_attacked(*k, opposite(side_));
}

void BoardState::validate() const {
  for (Color c : {Color::White, Color::Black}) {
    const std::uint8_t code = encode(Piece{c, PieceKind::King});
    const auto n = std::count(cells_.begin(), cells_.end(), code);
    if (n != 1) {
      throw InvalidPosition(std::string(color_name(c)) + " must have exactly one king");
    }
  }
  for (int file = 0; file < 8; ++file) {
    for (int rank : {0, 7}) {
      const auto p = at(Square(file, rank));
      if (p && p->kind == PieceKind::Pawn) {
        throw InvalidPosition("pawn on back rank at " + Square(file, rank).name());
      }
    }
  }
  if (en_passant_) {
    const int expected_rank = side_ == Color::White ? 5 : 2;
    if (en_passant_->rank() != expected_rank) {
      throw InvalidPosition("en-passant square " + en_passant_->name() +
                            " is on the wrong rank for the side to move");
    }
    const int pawn_rank = side_ == Color::White ? 4 : 3;
    const Square pushed(en_passant_->file(), pawn_rank);
    if (at(pushed) != Piece{opposite(side_), PieceKind::Pawn} || at(*en_passant_)) {
      throw InvalidPosition("en-passant square " + en_passant_->name() +
                            " does not follow a double pawn push");
    }
  }
  const auto other_king = king_square(opposite(side_));
  if (is_attacked(*other_king, side_)) {
    throw InvalidPosition("side not to move is in check");
  }
  if (halfmove_ < 0 || fullmove_ < 1) throw InvalidPosition("move counters out of range");
}

BoardState BoardState::from_fen(std::string_view fen) {
  std::istringstream in{std::string(fen)};
  std::string placement, side, castle, ep, half, full;
  if (!(in >> placement >> side >> castle >> ep)) {
    throw InvalidFen("FEN needs at least 4 fields: '" + std::string(fen) + "'");
  }
  in >> half >> full;
  std::string extra;
  if (in >> extra) throw InvalidFen("trailing data in FEN: '" + extra + "'");

  BoardState b;
  int rank = 7;
  int file = 0;
  for (char ch : placement) {
    if (ch == '/') {
      if (file != 8) throw InvalidFen("rank " + std::to_string(rank + 1) + " does not have 8 files");
      --rank;
      file = 0;
      if (rank < 0) throw InvalidFen("too many ranks");
      continue;
    }
    if (ch >= '1' && ch <= '8') {
      file += ch - '0';
      if (file > 8) throw InvalidFen("rank overflow");
      continue;
    }
    const auto kind = piece_kind_from_letter(static_cast<char>(std::toupper(ch)));
    if (!kind || file >= 8) throw InvalidFen(std::string("bad placement character '") + ch + "'");
    const Color c = std::isupper(static_cast<unsigned char>(ch)) ? Color::White : Color::Black;
    b.cells_[Square(file, rank).index()] = encode(Piece{c, *kind});
    ++file;
  }
  if (rank != 0 || file != 8) throw InvalidFen("placement must describe 8 full ranks");

  if (side == "w") b.side_ = Color::White;
  else if (side == "b") b.side_ = Color::Black;
  else throw InvalidFen("side to move must be 'w' or 'b'");

  if (castle != "-") {
    for (char ch : castle) {
      switch (ch) {
        case 'K': b.castling_.white_king = true; break;
        case 'Q': b.castling_.white_queen = true; break;
        case 'k': b.castling_.black_king = true; break;
        case 'q': b.castling_.black_queen = true; break;
        default: throw InvalidFen(std::string("bad castling character '") + ch + "'");
      }
    }
  }
  if (ep != "-") {
    const auto sq = Square::parse(ep);
    if (!sq) throw InvalidFen("bad en-passant square '" + ep + "'");
    b.en_passant_ = sq;
  }
  auto parse_counter = [](const std::string& s, int fallback) {
    if (s.empty()) return fallback;
    if (!std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      throw InvalidFen("bad move counter '" + s + "'");
    }
    return std::stoi(s);
  };
  b.halfmove_ = parse_counter(half, 0);
  b.fullmove_ = parse_counter(full, 1);
  b.validate();
  return b;
}

std::string BoardState::fen() const {
  std::string out;
  for (int rank = 7; rank >= 0; --rank) {
    int empty = 0;
    for (int file = 0; file < 8; ++file) {
      const auto p = at(Square(file, rank));
      if (!p) {
        ++empty;
        continue;
      }
      if (empty) out += static_cast<char>('0' + empty);
      empty = 0;
      const char letter = piece_letter(p->kind);
      out += p->color == Color::White ? letter : static_cast<char>(std::tolower(letter));
    }
    if (empty) out += static_cast<char>('0' + empty);
    if (rank) out += '/';
  }
  out += side_ == Color::White ? " w " : " b ";
  std::string cr;
  if (castling_.white_king) cr += 'K';
  if (castling_.white_queen) cr += 'Q';
  if (castling_.black_king) cr += 'k';
  if (castling_.black_queen) cr += 'q';
  out += cr.empty() ? "-" : cr;
  out += ' ';
  out += en_passant_ ? en_passant_->name() : "-";
  out += ' ' + std::to_string(halfmove_) + ' ' + std::to_string(fullmove_);
  return out;
}

BoardState::Builder& BoardState::Builder::put(Square sq, Piece piece) {
  board_.cells_[sq.index()] = encode(piece);
  return *this;
}

BoardState::Builder& BoardState::Builder::clear(Square sq) {
  board_.cells_[sq.index()] = 0;
  return *this;
}

BoardState::Builder& BoardState::Builder::side_to_move(Color c) {
  board_.side_ = c;
  return *this;
}

BoardState::Builder& BoardState::Builder::castling(CastlingRights rights) {
  board_.castling_ = rights;
  return *this;
}

BoardState::Builder& BoardState::Builder::en_passant(std::optional<Square> sq) {
  board_.en_passant_ = sq;
  return *this;
}

BoardState::Builder& BoardState::Builder::counters(int halfmove, int fullmove) {
  board_.halfmove_ = halfmove;
  board_.fullmove_ = fullmove;
  return *this;
}

BoardState BoardState::Builder::build() const {
  board_.validate();
  return board_;
}

std::string MoveRecord::uci() const {
  std::string s = from.name() + to.name();
  if (promotion) s += static_cast<char>(std::tolower(piece_letter(*promotion)));
  return s;
}

std::vector<MoveRecord> legal_moves(const BoardState& board) {
  std::vector<Move> legal = generate_legal(board);
  std::sort(legal.begin(), legal.end(), [](const Move& a, const Move& b) {
    if (a.from.index() != b.from.index()) return a.from.index() < b.from.index();
    if (a.to.index() != b.to.index()) return a.to.index() < b.to.index();
    return promotion_rank(a.promotion) < promotion_rank(b.promotion);
  });
  std::vector<MoveRecord> out;
  out.reserve(legal.size());
  for (const Move& m : legal) out.push_back(to_record(board, m, legal));
  return out;
}

bool has_legal_move(const BoardState& board) {
  std::vector<Move> pseudo;
  generate_pseudo(board, pseudo);
  return std::any_of(pseudo.begin(), pseudo.end(), [&](const Move& m) {
    return leaves_king_safe(make(board, m), board.side_to_move());
  });
}

bool is_checkmate(const BoardState& board) {
  return board.in_check() && !has_legal_move(board);
}

bool is_stalemate(const BoardState& board) {
  return !board.in_check() && !has_legal_move(board);
}

MoveRecord parse_san(const BoardState& board, std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  const std::string original(s);
  auto fail = [&](const std::string& why) -> UnparseableSan {
    return UnparseableSan("cannot parse SAN '" + original + "': " + why);
  };

  std::size_t glyphs = 0;
  while (glyphs < s.size() && is_annotation_char(s[s.size() - 1 - glyphs])) ++glyphs;
  std::string annotation(s.substr(s.size() - glyphs));
  s.remove_suffix(glyphs);
  if (!annotation.empty() && annotation != "!" && annotation != "!!" && annotation != "?" &&
      annotation != "??" && annotation != "!?" && annotation != "?!") {
    throw fail("unknown annotation '" + annotation + "'");
  }
  if (!s.empty() && (s.back() == '+' || s.back() == '#')) s.remove_suffix(1);
  if (s.empty()) throw fail("empty move");

  const std::vector<Move> legal = generate_legal(board);
  auto finish = [&](const Move& m) {
    MoveRecord rec = to_record(board, m, legal);
    rec.annotation = annotation;
    return rec;
  };

  if (s == "O-O" || s == "0-0" || s == "O-O-O" || s == "0-0-0") {
    const bool king_side = s.size() == 3;
    for (const Move& m : legal) {
      const auto p = board.at(m.from);
      if (p->kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2 &&
          (m.to.file() == 6) == king_side) {
        return finish(m);
      }
    }
    throw IllegalMove("castling '" + original + "' is not legal in " + describe(board));
  }

  // Grammar: [piece] [file] [rank] [x] square [[=]promotion]
  std::optional<PieceKind> promotion;
  if (!s.empty() && std::isupper(static_cast<unsigned char>(s.back()))) {
    promotion = piece_kind_from_letter(s.back());
    if (!promotion || *promotion == PieceKind::King || *promotion == PieceKind::Pawn) {
      throw fail("bad promotion piece");
    }
    s.remove_suffix(1);
    if (!s.empty() && s.back() == '=') s.remove_suffix(1);
  }
  if (s.size() < 2) throw fail("missing target square");
  const auto target = Square::parse(s.substr(s.size() - 2));
  if (!target) throw fail("bad target square '" + std::string(s.substr(s.size() - 2)) + "'");
  s.remove_suffix(2);
  if (!s.empty() && s.back() == 'x') s.remove_suffix(1);

  PieceKind kind = PieceKind::Pawn;
  if (!s.empty() && std::isupper(static_cast<unsigned char>(s.front()))) {
    const auto k = piece_kind_from_letter(s.front());
    if (!k || *k == PieceKind::Pawn) throw fail("bad piece letter");
    kind = *k;
    s.remove_prefix(1);
  }
  std::optional<int> from_file;
  std::optional<int> from_rank;
  if (!s.empty() && s.front() >= 'a' && s.front() <= 'h') {
    from_file = s.front() - 'a';
    s.remove_prefix(1);
  }
  if (!s.empty() && s.front() >= '1' && s.front() <= '8') {
    from_rank = s.front() - '1';
    s.remove_prefix(1);
  }
  if (!s.empty()) throw fail("unexpected characters");
  if (promotion && kind != PieceKind::Pawn) throw fail("only pawns promote");

  std::vector<const Move*> matches;
  for (const Move& m : legal) {
    const auto p = board.at(m.from);
    if (p->kind != kind || m.to != *target || m.promotion != promotion) continue;
    if (kind == PieceKind::King && std::abs(m.to.file() - m.from.file()) == 2) continue;
    if (from_file && m.from.file() != *from_file) continue;
    if (from_rank && m.from.rank() != *from_rank) continue;
    matches.push_back(&m);
  }
  if (matches.empty()) {
    throw IllegalMove("move '" + original + "' is not legal in " + describe(board));
  }
  if (matches.size() > 1) {
    throw AmbiguousMove("move '" + original + "' is ambiguous in " + describe(board));
  }
  return finish(*matches.front());
}

std::string format_san(const BoardState& board, const MoveRecord& move) {
  const std::vector<Move> legal = generate_legal(board);
  const Move* m = find_legal(legal, move.from, move.to, move.promotion);
  if (!m) throw IllegalMove("move " + move.uci() + " is not legal in " + describe(board));
  return san_for(board, *m, legal, make(board, *m));
}

MoveRecord parse_uci_move(const BoardState& board, std::string_view text) {
  if (text.size() != 4 && text.size() != 5) {
    throw UnparseableSan("bad UCI move '" + std::string(text) + "'");
  }
  const auto from = Square::parse(text.substr(0, 2));
  const auto to = Square::parse(text.substr(2, 2));
  std::optional<PieceKind> promotion;
  if (text.size() == 5) {
    promotion = piece_kind_from_letter(static_cast<char>(std::toupper(text[4])));
    if (!promotion) throw UnparseableSan("bad UCI promotion in '" + std::string(text) + "'");
  }
  if (!from || !to) throw UnparseableSan("bad UCI move '" + std::string(text) + "'");
  const std::vector<Move> legal = generate_legal(board);
  const Move* m = find_legal(legal, *from, *to, promotion);
  if (!m) {
    throw IllegalMove("move " + std::string(text) + " is not legal in " + describe(board));
  }
  return to_record(board, *m, legal);
}

BoardState apply_move(const BoardState& board, const MoveRecord& move) {
  const std::vector<Move> legal = generate_legal(board);
  const Move* m = find_legal(legal, move.from, move.to, move.promotion);
  if (!m) throw IllegalMove("move " + move.uci() + " is not legal in " + describe(board));
  return make(board, *m);
}

std::uint64_t perft(const BoardState& board, int depth) {
  if (depth <= 0) return 1;
  const std::vector<Move> legal = generate_legal(board);
  if (depth == 1) return legal.size();
  std::uint64_t total = 0;
  for (const Move& m : legal) total += perft(make(board, m), depth - 1);
  return total;
}

namespace {

std::optional<Square> effective_en_passant(const BoardState& b) {
  const auto ep = b.en_passant();
  if (!ep) return std::nullopt;
  const Color us = b.side_to_move();
  const int from_rank = ep->rank() - forward(us);
  for (int df : {-1, 1}) {
    const int f = ep->file() + df;
    if (on_board(f, from_rank) && b.at(Square(f, from_rank)) == Piece{us, PieceKind::Pawn}) {
      return ep;
    }
  }
  return std::nullopt;
}

}  // namespace

bool same_position(const BoardState& a, const BoardState& b) {
  for (Square s : all_squares()) {
    if (a.at(s) != b.at(s)) return false;
  }
  return a.side_to_move() == b.side_to_move() && a.castling() == b.castling() &&
         effective_en_passant(a) == effective_en_passant(b);
}

std::vector<AttackRelation> attack_relations(const BoardState& board, AttackMode mode) {
  std::vector<Square> order(64);
  for (int i = 0; i < 64; ++i) order[i] = Square::from_index(i);
  std::sort(order.begin(), order.end());

  std::vector<AttackRelation> out;
  for (Square from : order) {
    const auto attacker = board.at(from);
    if (!attacker) continue;
    for (Square to : order) {
      const auto target = board.at(to);
      if (!target || target->color == attacker->color) continue;
      if (!piece_attacks_square(board, from, *attacker, to)) continue;
      if (mode == AttackMode::StrictLegal) {
        BoardState after = board;
        A::cell(after, to) = A::cell(after, from);
        A::cell(after, from) = 0;
        const auto k = after.king_square(attacker->color);
        if (k && after.is_attacked(*k, opposite(attacker->color))) continue;
      }
      out.push_back({{*attacker, from}, {*target, to}});
    }
  }
  return out;
}

std::vector<PlacedPiece> listed_pieces(const BoardState& board) {
  static constexpr std::array<PieceKind, 6> kListingOrder = {
      PieceKind::King, PieceKind::Queen, PieceKind::Rook,
      PieceKind::Bishop, PieceKind::Knight, PieceKind::Pawn};
  std::vector<Square> order(64);
  for (int i = 0; i < 64; ++i) order[i] = Square::from_index(i);
  std::sort(order.begin(), order.end());

  std::vector<PlacedPiece> out;
  for (Color c : {Color::White, Color::Black}) {
    for (PieceKind k : kListingOrder) {
      for (Square s : order) {
        if (board.at(s) == Piece{c, k}) out.push_back({Piece{c, k}, s});
      }
    }
  }
  return out;
}

}  // namespace chesscomm::chess
