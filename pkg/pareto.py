# pareto.py

"""
Lanceur de la ligne de commande

Exemples :
    python pareto.py optimize --bench zdt2 --opt mgda --tol 1e-6
    python pareto.py explore --bench zdt2 --k 2 --s 0.1 --N 10
    python pareto.py front data/runs/<run> --stitch
    python pareto.py hv data/runs/<run>
"""

import sys

from src.cli.commands import main

if __name__ == '__main__':
    sys.exit(main())
