"""From transaction logs to an optimized assortment.

Frequent-itemset miners emit files with one itemset per line ("3 7 12
#SUP: 120").  Those sets are natural candidate assortments: they bundle
items customers actually buy together.  This script fakes a small mined
file, attaches prices to some of the items, and solves over the resulting
collection end to end.

With real data the flow is identical: mine itemsets externally, then point
``load_itemsets`` / ``instance_from_files`` (or the CLI) at the output.
"""

import tempfile
from pathlib import Path

import numpy as np

from assortmax import (exhaustive_search, assort_mnl, instance_from_files,
                       load_itemsets, revenue)

workdir = Path(tempfile.mkdtemp())

# a pretend miner output: item ids are sparse SKU codes, some lines carry
# support counts, and singletons are present but will be pruned
rng = np.random.default_rng(13)
skus = rng.choice(np.arange(1000, 9999), size=60, replace=False)
lines = [f"{skus[i]}" for i in range(10)]
for _ in range(120):
    size = int(rng.integers(3, 9))
    chosen = sorted(rng.choice(skus, size=size, replace=False))
    lines.append(" ".join(map(str, chosen)) + f" #SUP: {int(rng.integers(5, 400))}")
itemsets_file = workdir / "mined_itemsets.txt"
itemsets_file.write_text("\n".join(lines) + "\n")

# a partial price list; unpriced items get draws from the configured range
prices_file = workdir / "prices.csv"
with open(prices_file, "w") as fh:
    fh.write("id,price\n")
    for sku in skus[:40]:
        fh.write(f"{sku},{rng.uniform(2, 60):.2f}\n")

collection, dense_to_sku = load_itemsets(itemsets_file, min_card=3)
print(f"mined file: {len(lines)} lines; kept {len(collection)} sets of "
      f"cardinality >= 3 over {collection.n} distinct items")

inst, collection = instance_from_files(itemsets_file, prices_file,
                                       min_card=3, price_range=(2.0, 60.0),
                                       v0=1.0, seed=99)
print(f"instance: top price {inst.p1:.2f}, item labels preserved "
      f"(e.g. position 1 is SKU {inst.labels()[0]})")

best = assort_mnl(collection, inst, eps=0.05)
oracle = exhaustive_search(collection, inst)
sku_names = [inst.labels()[i - 1] for i in best.assortment.items]
print(f"\nbest mined assortment earns {best.revenue:.2f} "
      f"(exhaustive check: {oracle.revenue:.2f})")
print(f"it offers SKUs {sorted(sku_names)}")
