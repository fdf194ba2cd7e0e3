"""Synthetic used-car relations with planted dependencies.

Schema: model, make, car_type, year, condition, drive_train, doors, engine.
Exact dependencies: model -> make, model -> car_type, model -> drive_train,
model -> doors, year -> condition. Engine is drawn per model from one or two
options; year is drawn per model from its production window.
"""

from __future__ import annotations

import random

from .relation import Relation

ATTRIBUTES = ("model", "make", "car_type", "year", "condition", "drive_train", "doors", "engine")

# model, make, car_type, drive_train, doors, [(engine, weight), ...], first year, last year
CATALOG = (
    ("Civic", "Honda", "sedan", "FWD", "4", [("I4", 1.0)], 2003, 2012),
    ("Accord", "Honda", "sedan", "FWD", "4", [("I4", 0.65), ("V6", 0.35)], 2003, 2012),
    ("CR-V", "Honda", "SUV", "AWD", "5", [("I4", 1.0)], 2003, 2012),
    ("Odyssey", "Honda", "minivan", "FWD", "5", [("V6", 1.0)], 2005, 2012),
    ("Pilot", "Honda", "SUV", "4WD", "5", [("V6", 1.0)], 2003, 2012),
    ("Corolla", "Toyota", "sedan", "FWD", "4", [("I4", 1.0)], 2003, 2012),
    ("Camry", "Toyota", "sedan", "FWD", "4", [("I4", 0.7), ("V6", 0.3)], 2003, 2012),
    ("Prius", "Toyota", "hatchback", "FWD", "5", [("Hybrid", 1.0)], 2004, 2012),
    ("RAV4", "Toyota", "SUV", "AWD", "5", [("I4", 0.7), ("V6", 0.3)], 2003, 2012),
    ("Tacoma", "Toyota", "truck", "4WD", "4", [("I4", 0.4), ("V6", 0.6)], 2003, 2012),
    ("Sienna", "Toyota", "minivan", "FWD", "5", [("V6", 1.0)], 2004, 2012),
    ("Focus", "Ford", "sedan", "FWD", "4", [("I4", 1.0)], 2003, 2012),
    ("Fusion", "Ford", "sedan", "FWD", "4", [("I4", 0.6), ("V6", 0.4)], 2006, 2012),
    ("Mustang", "Ford", "coupe", "RWD", "2", [("V6", 0.6), ("V8", 0.4)], 2003, 2012),
    ("Explorer", "Ford", "SUV", "4WD", "5", [("V6", 0.75), ("V8", 0.25)], 2003, 2012),
    ("F-150", "Ford", "truck", "4WD", "4", [("V6", 0.4), ("V8", 0.6)], 2003, 2012),
    ("Escape", "Ford", "SUV", "AWD", "5", [("I4", 0.6), ("V6", 0.4)], 2003, 2012),
    ("Malibu", "Chevrolet", "sedan", "FWD", "4", [("I4", 0.7), ("V6", 0.3)], 2004, 2012),
    ("Impala", "Chevrolet", "sedan", "FWD", "4", [("V6", 1.0)], 2003, 2012),
    ("Silverado", "Chevrolet", "truck", "4WD", "4", [("V6", 0.3), ("V8", 0.7)], 2003, 2012),
    ("Tahoe", "Chevrolet", "SUV", "4WD", "5", [("V8", 1.0)], 2003, 2012),
    ("Corvette", "Chevrolet", "convertible", "RWD", "2", [("V8", 1.0)], 2003, 2012),
    ("Altima", "Nissan", "sedan", "FWD", "4", [("I4", 0.7), ("V6", 0.3)], 2003, 2012),
    ("Sentra", "Nissan", "sedan", "FWD", "4", [("I4", 1.0)], 2003, 2012),
    ("Rogue", "Nissan", "SUV", "AWD", "5", [("I4", 1.0)], 2008, 2012),
    ("Maxima", "Nissan", "sedan", "FWD", "4", [("V6", 1.0)], 2003, 2012),
    ("Jetta", "Volkswagen", "sedan", "FWD", "4", [("I4", 1.0)], 2003, 2012),
    ("Passat", "Volkswagen", "wagon", "FWD", "5", [("I4", 0.6), ("V6", 0.4)], 2003, 2012),
    ("Golf", "Volkswagen", "hatchback", "FWD", "3", [("I4", 1.0)], 2003, 2012),
    ("3 Series", "BMW", "sedan", "RWD", "4", [("I6", 1.0)], 2003, 2012),
    ("X5", "BMW", "SUV", "AWD", "5", [("I6", 0.6), ("V8", 0.4)], 2003, 2012),
    ("Outback", "Subaru", "wagon", "AWD", "5", [("H4", 0.7), ("H6", 0.3)], 2003, 2012),
    ("Forester", "Subaru", "SUV", "AWD", "5", [("H4", 1.0)], 2003, 2012),
    ("Elantra", "Hyundai", "sedan", "FWD", "4", [("I4", 1.0)], 2003, 2012),
    ("Sonata", "Hyundai", "sedan", "FWD", "4", [("I4", 0.7), ("V6", 0.3)], 2003, 2012),
    ("Wrangler", "Jeep", "SUV", "4WD", "2", [("V6", 1.0)], 2003, 2012),
    ("Grand Cherokee", "Jeep", "SUV", "4WD", "5", [("V6", 0.6), ("V8", 0.4)], 2003, 2012),
    ("Miata", "Mazda", "convertible", "RWD", "2", [("I4", 1.0)], 2003, 2012),
    ("Mazda3", "Mazda", "hatchback", "FWD", "5", [("I4", 1.0)], 2004, 2012),
    ("Caravan", "Dodge", "minivan", "FWD", "5", [("V6", 1.0)], 2003, 2012),
)

NEWEST_YEAR = 2012


def condition_for(year: int) -> str:
    if year >= NEWEST_YEAR:
        return "new"
    if year >= NEWEST_YEAR - 2:
        return "certified"
    return "used"


def generate_cars(n: int, seed: int = 0, zipf: float = 0.8) -> Relation:
    """``n`` clean car tuples; model popularity follows a Zipf law with exponent ``zipf``."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(seed)
    order = list(CATALOG)
    rng.shuffle(order)
    weights = [1.0 / (k + 1) ** zipf for k in range(len(order))]
    rows = []
    for entry in rng.choices(order, weights=weights, k=n):
        model, make, car_type, drive, doors, engines, first, last = entry
        year = rng.randint(first, last)
        engine = rng.choices([e for e, _ in engines], weights=[w for _, w in engines])[0]
        rows.append((model, make, car_type, str(year), condition_for(year), drive, doors, engine))
    return Relation.from_rows(ATTRIBUTES, rows, source=f"synthetic-cars(n={n},seed={seed})")


def example_relation() -> Relation:
    """Five-attribute car sample with each group repeated by its frequency (470 rows)."""
    groups = [
        (("Accord", "Honda", "JPN", "Full-size", "V6"), 100),
        (("Accord", "Honda", "JPN", "Full-size", "V4"), 150),
        (("Civic", "Honda", "JPN", "Mid-size", "V4"), 100),
        (("Focus", "Honda", "JPN", "Full-size", "V6"), 15),
        (("Focus", "Ford", "USA", "Compact", "V4"), 105),
    ]
    rows = [g for g, k in groups for _ in range(k)]
    return Relation.from_rows(("Model", "Make", "Orig", "CarType", "Engine"), rows, source="example")
