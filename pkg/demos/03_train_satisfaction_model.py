"""Train the satisfaction network on synthetic survey data.

No real survey responses ship with the package, so the generator plays
respondent: it samples ride scenarios, applies a noisy decision rule,
and emits 1..7 ratings. The network then has a recoverable target and a
known noise floor to compare against.
"""

import os

from lastmile import (
    Gender,
    MLPModel,
    PassengerProfile,
    RideOffer,
    Seat,
    generate_synthetic_dataset,
    load_model,
    save_model,
    train_mlp,
    write_dataset,
)

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

data = generate_synthetic_dataset(5000, seed=11)
print(f"dataset: {len(data.label)} rows, label mean {data.label.mean():.3f}")
write_dataset(data, os.path.join(OUT, "synthetic.csv"))

result = train_mlp(data, seed=5)
print(f"train rmse {result.train_rmse:.3f}  val rmse {result.val_rmse:.3f}  "
      f"test rmse {result.test_rmse:.3f}")
print(f"stopped after epoch {result.epochs_run} "
      f"(best validation at epoch {result.best_epoch})")

model_path = os.path.join(OUT, "satisfaction.npz")
save_model(result.weights, model_path)
model = MLPModel(load_model(model_path))
print(f"saved weights to {model_path}")

# poke the model: same trip, shrinking payment
rider = PassengerProfile(age=30, gender=Gender.FEMALE, employed=True)
for shared_cost in (18.0, 14.0, 8.0):
    offer = RideOffer(
        private_time=20.0, private_cost=20.0,
        shared_time=26.0, shared_cost=shared_cost,
        n_additional=2, seat=Seat.LEFT_BACK,
    )
    print(f"  pay {shared_cost:5.2f} instead of 20.00 solo "
          f"-> predicted satisfaction {model.score(rider, offer):.2f}")
