"""Projects MovieLens ratings.csv + movies.csv into the ratings schema.

Keeps movies labelled with exactly one genre, restricted to the `--top`
most-rated such genres, and writes `user_id,item_id,genre,rating` with genres
numbered 1..top by descending record count. The mapping goes to stderr.

    python3 movielens_to_ratings.py ml-25m/ratings.csv ml-25m/movies.csv --top 4 > ratings.csv
"""
import argparse
import collections
import csv
import sys


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("ratings")
    ap.add_argument("movies")
    ap.add_argument("--top", type=int, default=4)
    args = ap.parse_args()

    single = {}
    with open(args.movies, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            genres = row["genres"].split("|")
            if len(genres) == 1 and genres[0] != "(no genres listed)":
                single[row["movieId"]] = genres[0]

    counts = collections.Counter()
    with open(args.ratings, newline="") as f:
        for row in csv.DictReader(f):
            g = single.get(row["movieId"])
            if g is not None:
                counts[g] += 1
    top = [g for g, _ in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[: args.top]]
    index = {g: i + 1 for i, g in enumerate(top)}
    for g, i in index.items():
        print(f"{i}: {g} ({counts[g]} ratings)", file=sys.stderr)

    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["user_id", "item_id", "genre", "rating"])
    with open(args.ratings, newline="") as f:
        for row in csv.DictReader(f):
            g = single.get(row["movieId"])
            if g in index:
                out.writerow([row["userId"], row["movieId"], index[g], row["rating"]])


if __name__ == "__main__":
    main()
