#!/usr/bin/env python3
"""Writes the small reference datasets used by the test suites into tests/data/."""
import csv
import itertools
import pathlib

from sklearn import datasets

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data"


def write_sklearn(name, loader, feature_names=None):
    bunch = loader()
    names = feature_names or [n.replace(" (cm)", "").replace(" ", "_") for n in bunch.feature_names]
    with open(OUT / f"{name}.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names + ["class"])
        for row, label in zip(bunch.data, bunch.target):
            w.writerow([repr(float(v)) for v in row] + [bunch.target_names[label]])


def tictactoe_endgames():
    # Every board reachable by legal play (x first) that ends the game: a win or a full board.
    lines = [(0, 1, 2), (3, 4, 5), (6, 7, 8), (0, 3, 6), (1, 4, 7), (2, 5, 8), (0, 4, 8), (2, 4, 6)]

    def winner(b):
        for a, c, d in lines:
            if b[a] != "b" and b[a] == b[c] == b[d]:
                return b[a]
        return None

    seen = {}

    def play(board, player):
        w = winner(board)
        if w or "b" not in board:
            seen[tuple(board)] = "positive" if w == "x" else "negative"
            return
        for i in range(9):
            if board[i] == "b":
                board[i] = player
                play(board, "o" if player == "x" else "x")
                board[i] = "b"

    play(["b"] * 9, "x")
    return seen


def write_tictactoe():
    cells = ["top_left", "top_middle", "top_right", "middle_left", "middle_middle",
             "middle_right", "bottom_left", "bottom_middle", "bottom_right"]
    boards = tictactoe_endgames()
    with open(OUT / "tictactoe.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cells + ["class"])
        for board in sorted(boards):
            w.writerow(list(board) + [boards[board]])
    return len(boards)


if __name__ == "__main__":
    OUT.mkdir(parents=True, exist_ok=True)
    write_sklearn("iris", datasets.load_iris)
    write_sklearn("wine", datasets.load_wine)
    print("tictactoe rows:", write_tictactoe())
