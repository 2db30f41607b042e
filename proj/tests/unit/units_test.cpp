#include <gtest/gtest.h>

#include "vibpol/units.hpp"

using namespace vibpol::units;

TEST(Units, ElectronVoltToHartree) { EXPECT_NEAR(ev_to_hartree(6.8), 0.249895, 1e-6); }

TEST(Units, DaltonToElectronMass) { EXPECT_NEAR(dalton_to_au(8.5), 15494.55, 0.01); }

TEST(Units, FemtosecondRoundTrip) {
  EXPECT_NEAR(fs_to_au(1.0), 41.341373, 1e-6);
  EXPECT_DOUBLE_EQ(au_to_fs(fs_to_au(62.5)), 62.5);
}

TEST(Units, WavenumberRoundTrip) {
  EXPECT_NEAR(hartree_to_wavenumber(wavenumber_to_hartree(1838.26)), 1838.26, 1e-10);
}

TEST(Units, GenericConvertMatchesHelpers) {
  EXPECT_DOUBLE_EQ(convert(6.8, Unit::ElectronVolt, Unit::Hartree), ev_to_hartree(6.8));
  EXPECT_NEAR(convert(1.0, Unit::Debye, Unit::AtomicDipole), 0.393430238, 1e-12);
  EXPECT_NEAR(convert(1.0, Unit::Bohr, Unit::Angstrom), 0.529177210903, 1e-12);
  EXPECT_NEAR(convert(1.0, Unit::ElectronVolt, Unit::Wavenumber), 8065.544, 1e-3);
}

TEST(Units, IncompatibleDimensionsRejected) {
  EXPECT_THROW(convert(1.0, Unit::Hartree, Unit::Femtosecond), std::invalid_argument);
  EXPECT_THROW(convert(1.0, Unit::Debye, Unit::Dalton), std::invalid_argument);
}
