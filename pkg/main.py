"""
Entry point for running the engine from a source checkout.

    python main.py simulate --scenario scenarios/point_bounce.json --out out/
"""
from impact.cli import run

if __name__ == "__main__":
    run()
