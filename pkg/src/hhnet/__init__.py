"""Build household networks from individual social networks and compare
what the two representations say."""

__version__ = "0.1.0"

from hhnet.errors import DegeneracyError, HHNetError, ValidationError
from hhnet.graph import (AdjacencyDecomposition, Edge, HouseholdPartition, IndividualNetwork,
                         NetworkBundle, NodeAttributes, PersonAttributes, build_network,
                         decompose, reweight_intra)
from hhnet.contraction import (GenderedPair, HouseholdNetwork, contract_basic, contract_gendered,
                               contract_layered, contract_weighted,
                               map_households_to_individuals, map_individuals_to_households)

__all__ = [
    "__version__", "DegeneracyError", "HHNetError", "ValidationError",
    "AdjacencyDecomposition", "Edge", "HouseholdPartition", "IndividualNetwork", "NetworkBundle",
    "NodeAttributes", "PersonAttributes", "build_network", "decompose", "reweight_intra",
    "GenderedPair", "HouseholdNetwork", "contract_basic", "contract_gendered", "contract_layered",
    "contract_weighted", "map_households_to_individuals", "map_individuals_to_households",
]
