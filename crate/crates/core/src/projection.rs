//! Transverse Mercator on the WGS84 ellipsoid with the SVY21 grid
//! parameters (EPSG:3414).
//!
//! Uses the 6th-order Krüger series in the third flattening, which is accurate
//! to well below a millimetre across the country and inverts to ~1e-12 degrees.

use thiserror::Error;

use crate::geom::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("coordinate out of range: lon {lon}, lat {lat}")]
    OutOfRange { lon: f64, lat: f64 },
}

/// Ellipsoid + grid definition for a transverse Mercator zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmParams {
    pub semi_major: f64,
    pub inv_flattening: f64,
    pub lat0_deg: f64,
    pub lon0_deg: f64,
    pub scale: f64,
    pub false_easting: f64,
    pub false_northing: f64,
}

/// SVY21 / Singapore TM.
pub const SVY21: TmParams = TmParams {
    semi_major: 6_378_137.0,
    inv_flattening: 298.257_223_563,
    lat0_deg: 1.0 + 22.0 / 60.0,
    lon0_deg: 103.0 + 50.0 / 60.0,
    scale: 1.0,
    false_easting: 28_001.642,
    false_northing: 38_744.572,
};

#[derive(Debug, Clone)]
pub struct TransverseMercator {
    p: TmParams,
    e: f64,
    /// Rectifying radius times scale.
    ka: f64,
    alpha: [f64; 6],
    beta: [f64; 6],
    /// Scaled ξ of the origin latitude on the central meridian.
    y0: f64,
}

impl TransverseMercator {
    pub fn new(p: TmParams) -> Self {
        let f = 1.0 / p.inv_flattening;
        let e = (f * (2.0 - f)).sqrt();
        let n = f / (2.0 - f);
        let n2 = n * n;
        let n3 = n2 * n;
        let n4 = n3 * n;
        let n5 = n4 * n;
        let n6 = n5 * n;
        let a_rect = p.semi_major / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
        let alpha = [
            n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0
                + 7891.0 * n6 / 37800.0,
            13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0
                - 1983433.0 * n6 / 1935360.0,
            61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167603.0 * n6 / 181440.0,
            49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
            34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
            212378941.0 * n6 / 319334400.0,
        ];
        let beta = [
            n / 2.0 - 2.0 * n2 / 3.0 + 37.0 * n3 / 96.0 - n4 / 360.0 - 81.0 * n5 / 512.0
                + 96199.0 * n6 / 604800.0,
            n2 / 48.0 + n3 / 15.0 - 437.0 * n4 / 1440.0 + 46.0 * n5 / 105.0 - 1118711.0 * n6 / 3870720.0,
            17.0 * n3 / 480.0 - 37.0 * n4 / 840.0 - 209.0 * n5 / 4480.0 + 5569.0 * n6 / 90720.0,
            4397.0 * n4 / 161280.0 - 11.0 * n5 / 504.0 - 830251.0 * n6 / 7257600.0,
            4583.0 * n5 / 161280.0 - 108847.0 * n6 / 3991680.0,
            20648693.0 * n6 / 638668800.0,
        ];
        let mut tm = Self {
            p,
            e,
            ka: p.scale * a_rect,
            alpha,
            beta,
            y0: 0.0,
        };
        let (xi0, _) = tm.xi_eta(p.lat0_deg.to_radians(), 0.0);
        tm.y0 = tm.ka * xi0;
        tm
    }

    pub fn svy21() -> Self {
        Self::new(SVY21)
    }

    /// Gauss-Krüger (ξ, η) for geodetic latitude φ and longitude offset λ (radians).
    fn xi_eta(&self, phi: f64, lam: f64) -> (f64, f64) {
        let e = self.e;
        let s = phi.sin();
        let t = (s.atanh() - e * (e * s).atanh()).sinh();
        let xi_p = t.atan2(lam.cos());
        let eta_p = (lam.sin() / (1.0 + t * t).sqrt()).atanh();
        let mut xi = xi_p;
        let mut eta = eta_p;
        for (j, a) in self.alpha.iter().enumerate() {
            let k = 2.0 * (j as f64 + 1.0);
            xi += a * (k * xi_p).sin() * (k * eta_p).cosh();
            eta += a * (k * xi_p).cos() * (k * eta_p).sinh();
        }
        (xi, eta)
    }

    pub fn forward(&self, lon: f64, lat: f64) -> Result<Point, ProjectionError> {
        if !(lon.is_finite() && lat.is_finite()) || !(-180.0..=180.0).contains(&lon) || lat <= -90.0 || lat >= 90.0 {
            return Err(ProjectionError::OutOfRange { lon, lat });
        }
        let lam = (lon - self.p.lon0_deg).to_radians();
        let (xi, eta) = self.xi_eta(lat.to_radians(), lam);
        Ok(Point::new(
            self.p.false_easting + self.ka * eta,
            self.p.false_northing + self.ka * xi - self.y0,
        ))
    }

    /// Returns (lon, lat) in degrees.
    pub fn inverse(&self, p: Point) -> (f64, f64) {
        let xi = (p.y - self.p.false_northing + self.y0) / self.ka;
        let eta = (p.x - self.p.false_easting) / self.ka;
        let mut xi_p = xi;
        let mut eta_p = eta;
        for (j, b) in self.beta.iter().enumerate() {
            let k = 2.0 * (j as f64 + 1.0);
            xi_p -= b * (k * xi).sin() * (k * eta).cosh();
            eta_p -= b * (k * xi).cos() * (k * eta).sinh();
        }
        let tau_p = xi_p.sin() / (eta_p.sinh().powi(2) + xi_p.cos().powi(2)).sqrt();
        let lam = eta_p.sinh().atan2(xi_p.cos());
        let tau = self.tau_from_conformal(tau_p);
        (self.p.lon0_deg + lam.to_degrees(), tau.atan().to_degrees())
    }

    /// Newton solve of τ' = τ√(1+σ²) − σ√(1+τ²) for τ = tan φ.
    fn tau_from_conformal(&self, tau_p: f64) -> f64 {
        let e = self.e;
        let e2m = 1.0 - e * e;
        let mut tau = tau_p / e2m;
        for _ in 0..10 {
            let sig = (e * (e * tau / (1.0 + tau * tau).sqrt()).atanh()).sinh();
            let tp = tau * (1.0 + sig * sig).sqrt() - sig * (1.0 + tau * tau).sqrt();
            let d = (tau_p - tp) * (1.0 + e2m * tau * tau)
                / (e2m * (1.0 + tp * tp).sqrt() * (1.0 + tau * tau).sqrt());
            tau += d;
            if d.abs() <= 1e-15 * tau.abs().max(1.0) {
                break;
            }
        }
        tau
    }
}

/// Projects WGS84 longitude/latitude to SVY21 metres.
pub fn project_lonlat(lon: f64, lat: f64) -> Result<Point, ProjectionError> {
    thread_local! {
        static SVY: TransverseMercator = TransverseMercator::svy21();
    }
    SVY.with(|tm| tm.forward(lon, lat))
}

pub fn unproject(p: Point) -> (f64, f64) {
    TransverseMercator::svy21().inverse(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_maps_to_false_offsets() {
        let p = project_lonlat(SVY21.lon0_deg, SVY21.lat0_deg).unwrap();
        assert!((p.x - 28001.642).abs() < 1e-6, "{p:?}");
        assert!((p.y - 38744.572).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn round_trip() {
        let p = project_lonlat(103.799, 1.277).unwrap();
        let (lon, lat) = unproject(p);
        assert!((lon - 103.799).abs() < 1e-9);
        assert!((lat - 1.277).abs() < 1e-9);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(project_lonlat(181.0, 1.0).is_err());
        assert!(project_lonlat(103.0, 90.0).is_err());
        assert!(project_lonlat(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn east_of_origin_increases_easting() {
        let a = project_lonlat(103.84, 1.3).unwrap();
        let b = project_lonlat(103.85, 1.3).unwrap();
        assert!(b.x > a.x);
        // ~1.113 km per 0.01° of longitude at this latitude
        assert!(((b.x - a.x) - 1113.0).abs() < 5.0);
    }
}
