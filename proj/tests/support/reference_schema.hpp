#pragma once

#include <map>
#include <string>
#include <vector>

namespace adw::fixture {

// Reference attribute lists; the second map gives catalog spellings for
// the generic names the reference lists reuse across tables.
inline const std::map<std::string, std::vector<std::string>> kReference = {
    {"FieldFact",
     {"FieldFactID", "CropID", "FieldID", "PestID", "FertiliserID", "SoildID", "OperationTimeID", "TreatmentID",
      "NutrientID", "SprayID", "Yield", "WaterVolumn", "FertiliserQuantity", "NutrientQuantity", "SprayQuantity",
      "PestNumber"}},
    {"OrderFact", {"OrderID", "FarmerID", "SupplierID", "ProductID", "TransTimeID", "Quantity", "Price"}},
    {"SaleFact", {"SaleID", "FarmerID", "BusinessID", "CropID", "SaleDate", "Unit", "Quantity", "Price"}},
    {"Field", {"FieldID", "FieldName", "FieldArea", "FieldGPS", "FieldGeometric", "SiteID"}},
    {"Crop", {"CropID", "CropName", "EstYield", "BbchScale", "HarvestEquipment", "HarvestEquipmentWeight"}},
    {"Soil",
     {"SoilID", "PH", "Nitrogen", "Phosphorus", "Potassium", "Magnesium", "Calcium", "TextureLabel", "Silt", "Clay",
      "Sand", "CEC", "OrganicMatter", "RecommendedNutrient", "TestingDate"}},
    {"Pest", {"PestID", "CommonName", "PestType", "Density", "Coverage", "DetectedDate"}},
    {"Business", {"BusinessID", "Name", "Address", "Phone", "Mobile", "Email"}},
    {"CropState",
     {"CropStateID", "CropID", "StageScale", "Height", "MajorStage", "MinStage", "MaxStage", "Diameter", "MinHeight",
      "MaxHeight", "CropCoveragePercent"}},
    {"Farmer", {"FarmerID", "Name", "Address", "Phone", "Mobile", "Email"}},
    {"Fertiliser", {"FertiliserID", "Name", "Unit", "Status", "Description", "GroupName"}},
    {"Inspection",
     {"InspectionID", "CropID", "Description", "ProblemType", "Severity", "ProblemNotes", "AreaValue", "AreaUnit",
      "Order", "Date", "Notes", "GrowthStage"}},
    {"Nutrient", {"NutrientID", "NutrientName", "Date", "Quantity"}},
    {"OperationTime", {"OperationTimeID", "StartDate", "EndDate", "Season"}},
    {"Plan", {"PlanID", "PName", "RegisNo", "ProductName", "ProductRate", "Date", "WaterVolume"}},
    {"Product", {"ProductID", "ProductName", "GroupName"}},
    {"Site", {"SiteID", "FarmerID", "SiteName", "Reference", "Country", "Address", "GPS", "CreatedBy"}},
    {"Spray",
     {"SprayID", "SprayProductName", "ProductRate", "Area", "Date", "WaterVol", "ConfDuration", "ConfWindSPeed",
      "ConfDirection", "ConfHumidity", "ConfTemp", "ActivityType"}},
    {"Supplier", {"SupplierID", "Name", "ContactName", "Address", "Phone", "Mobile", "Email"}},
    {"Task", {"TaskID", "Desc", "Status", "TaskDate", "TaskInterval", "CompDate", "AppCode"}},
    {"TransTime", {"TransTimeID", "OrderDate", "DeliverDate", "ReceivedDate", "Season"}},
    {"Treatment",
     {"TreatmentID", "TreatmentName", "FormType", "LotCode", "Rate", "ApplCode", "LevlNo", "Type", "Description",
      "ApplDesc", "TreatmentComment"}},
    {"WeatherReading",
     {"WeatherReadingID", "WeatherStationID", "ReadingDate", "ReadingTime", "AirTemperature", "Rainfall", "SPLite",
      "RelativeHumidity", "WindSpeed", "WindDirection", "SoilTemperature", "LeafWetness"}},
    {"WeatherStation", {"WeatherStationID", "StationName", "Latitude", "Longitude", "Region"}},
};

inline const std::map<std::string, std::string> kAliases = {
    {"Business.Name", "BusinessName"},         {"Farmer.Name", "FarmerName"},
    {"Fertiliser.Name", "FertiliserName"},     {"Fertiliser.GroupName", "FertiliserGroupName"},
    {"Supplier.Name", "SupplierName"},
};

}  // namespace adw::fixture
