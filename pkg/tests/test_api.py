# tests/test_api.py
import unittest

from api import create_api

PARAMETERS = {
    "assets": ["USD-JPY", "Brent Oil", "DAX", "Dow Jones"],
    "means": [0.00029673, 0.00364822, 0.00142506, 0.0017301],
    "covariance": [
        [2.5e-5, 1.0e-6, 2.0e-6, 1.5e-6],
        [1.0e-6, 2.06e-4, 3.0e-5, 2.5e-5],
        [2.0e-6, 3.0e-5, 1.44e-4, 6.0e-5],
        [1.5e-6, 2.5e-5, 6.0e-5, 7.4e-5]
    ]
}


class TestAPI(unittest.TestCase):
    """Test cases for the API."""

    def setUp(self):
        """Set up test fixtures before each test."""
        self.app, self.api_handler = create_api()
        self.app.config['TESTING'] = True
        self.client = self.app.test_client()

    def test_construct_full_set(self):
        """Test the single-portfolio report."""
        response = self.client.post('/api/portfolios', json=PARAMETERS)
        self.assertEqual(response.status_code, 200)
        data = response.get_json()
        self.assertTrue(data['success'])
        self.assertEqual(data['data']['P'], 1)
        portfolio = data['data']['portfolios'][0]
        self.assertEqual(portfolio['indices'], [1, 2, 3, 4])
        self.assertAlmostEqual(sum(portfolio['mv']['weights']), 1.0, places=10)
        self.assertAlmostEqual(sum(portfolio['mrar']['weights']), 1.0, places=10)

    def test_construct_enumerated(self):
        """Test enumeration with a method filter and top K."""
        body = dict(PARAMETERS, enumerate=True, method="mrar", top=3)
        response = self.client.post('/api/portfolios', json=body)
        self.assertEqual(response.status_code, 200)
        data = response.get_json()['data']
        self.assertEqual(data['P'], 11)
        self.assertEqual(len(data['portfolios']), 3)
        self.assertEqual(data['portfolios'][0]['ordinal'], data['best_mrar'])
        self.assertIsNone(data['portfolios'][0]['mv'])
        self.assertIsNone(data['best_mv'])

    def test_malformed_parameters(self):
        """Test that invalid parameters are a 400."""
        body = dict(PARAMETERS, means=[0.1, 0.2])
        response = self.client.post('/api/portfolios', json=body)
        self.assertEqual(response.status_code, 400)
        data = response.get_json()
        self.assertFalse(data['success'])
        self.assertIn('DimensionMismatch', data['errors'][0])

    def test_missing_body(self):
        """Test that a non-JSON body is a 400."""
        response = self.client.post('/api/portfolios', data="not json", content_type="text/plain")
        self.assertEqual(response.status_code, 400)

    def test_invalid_options(self):
        """Test that bad options are a 400."""
        for options in ({"method": "sharpe"}, {"top": 0}, {"enumerate": "yes"}):
            response = self.client.post('/api/portfolios', json=dict(PARAMETERS, **options))
            self.assertEqual(response.status_code, 400, msg=str(options))

    def test_singular_system(self):
        """Test that a singular full set is a 422."""
        body = {
            "assets": ["A", "B", "C"],
            "means": [0.01, 0.02, 0.02],
            "covariance": [[4e-4, 1e-4, 1e-4], [1e-4, 9e-4, 9e-4], [1e-4, 9e-4, 9e-4]]
        }
        response = self.client.post('/api/portfolios', json=body)
        self.assertEqual(response.status_code, 422)
        self.assertIn('SingularSystem', response.get_json()['errors'][0])

    def test_portfolio_count(self):
        """Test the count endpoint."""
        response = self.client.get('/api/portfolios/count?n=10')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.get_json()['data'], {"n": 10, "P": 1013})

    def test_portfolio_count_invalid(self):
        """Test non-integer and out-of-range counts."""
        self.assertEqual(self.client.get('/api/portfolios/count?n=abc').status_code, 400)
        self.assertEqual(self.client.get('/api/portfolios/count?n=1').status_code, 400)
        self.assertEqual(self.client.get('/api/portfolios/count?n=100').status_code, 400)

    def test_cors_headers(self):
        """Test that responses allow cross-origin dashboards."""
        response = self.client.get('/api/portfolios/count?n=4', headers={"Origin": "http://localhost:3000"})
        self.assertEqual(response.headers.get("Access-Control-Allow-Origin"), "*")


if __name__ == '__main__':
    unittest.main()
